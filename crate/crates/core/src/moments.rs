//! Limiting moments `M(m, d) = lim E[(H_d(n) / n)^m]` of the heaviest-bin
//! fraction at `gamma = 1`, in exact rational arithmetic.
//!
//! Three recurrences produce the same table:
//!
//! * [`Recurrence::MultiTerm`] expresses `M(m, d)` through the whole column
//!   `M(0..=m, d - 1)`.
//! * [`Recurrence::TwoTerm`] uses only `M(m, d - 1)` and `M(m - 1, d)`.
//! * [`Recurrence::IteratedSum`] uses the previous row `M(m - 1, 1..=d)`.
//!
//! Base cases: `M(0, d) = 1` and `M(m, 1) = 1`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

fn ratio(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn check_bins(d: u32) -> Result<()> {
    if d == 0 {
        Err(Error::domain("the number of bins d must be at least 1"))
    } else {
        Ok(())
    }
}

/// Which recurrence fills a [`MomentTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Recurrence {
    MultiTerm,
    #[default]
    TwoTerm,
    IteratedSum,
}

impl Recurrence {
    pub const ALL: [Recurrence; 3] = [
        Recurrence::MultiTerm,
        Recurrence::TwoTerm,
        Recurrence::IteratedSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Recurrence::MultiTerm => "multi-term",
            Recurrence::TwoTerm => "two-term",
            Recurrence::IteratedSum => "iterated-sum",
        }
    }
}

impl fmt::Display for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Recurrence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multi-term" | "multiterm" | "multi" => Ok(Recurrence::MultiTerm),
            "two-term" | "twoterm" | "two" => Ok(Recurrence::TwoTerm),
            "iterated-sum" | "iteratedsum" | "iterated" => Ok(Recurrence::IteratedSum),
            other => Err(Error::domain(format!("unknown recurrence `{other}`"))),
        }
    }
}

/// Size cap for [`MomentTable`] construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableLimits {
    /// Maximum number of stored entries, `(m_max + 1) * d_max`.
    pub max_entries: u64,
}

impl Default for TableLimits {
    fn default() -> Self {
        TableLimits {
            max_entries: 1_000_000,
        }
    }
}

/// Memoized `M(m, d)` for `0 <= m <= m_max`, `1 <= d <= d_max`.
///
/// Filled bottom-up by a single writer; once built it is immutable and can be
/// shared freely between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    recurrence: Recurrence,
    // rows[m][d - 1]
    rows: Vec<Vec<Rational>>,
}

impl MomentTable {
    pub fn new(recurrence: Recurrence) -> Self {
        MomentTable {
            recurrence,
            rows: Vec::new(),
        }
    }

    pub fn build(m_max: u32, d_max: u32, recurrence: Recurrence, limits: TableLimits) -> Result<Self> {
        let mut table = MomentTable::new(recurrence);
        table.ensure(m_max, d_max, limits)?;
        Ok(table)
    }

    pub fn recurrence(&self) -> Recurrence {
        self.recurrence
    }

    /// Largest stored moment order, if any entries exist.
    pub fn m_max(&self) -> Option<u32> {
        self.rows.len().checked_sub(1).map(|m| m as u32)
    }

    /// Largest stored bin count (0 when empty).
    pub fn d_max(&self) -> u32 {
        self.rows.first().map_or(0, |row| row.len() as u32)
    }

    pub fn get(&self, m: u32, d: u32) -> Option<&Rational> {
        if d == 0 {
            return None;
        }
        self.rows.get(m as usize)?.get(d as usize - 1)
    }

    /// Entries in `(m, d, value)` order, row by row.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, &Rational)> + '_ {
        self.rows.iter().enumerate().flat_map(|(m, row)| {
            row.iter()
                .enumerate()
                .map(move |(i, v)| (m as u32, i as u32 + 1, v))
        })
    }

    /// Extends the table so that it covers at least `m_max` x `d_max`.
    pub fn ensure(&mut self, m_max: u32, d_max: u32, limits: TableLimits) -> Result<()> {
        check_bins(d_max)?;
        let m_max = m_max.max(self.m_max().unwrap_or(0));
        let d_max = d_max.max(self.d_max());
        let entries = (u64::from(m_max) + 1) * u64::from(d_max);
        if entries > limits.max_entries {
            return Err(Error::resource("moment table", entries, limits.max_entries));
        }
        // Row m needs rows < m to already span the new width, so extend in
        // ascending m and, within a row, ascending d.
        for m in 0..=m_max {
            if self.rows.len() <= m as usize {
                self.rows.push(Vec::with_capacity(d_max as usize));
            }
            for d in self.rows[m as usize].len() as u32 + 1..=d_max {
                let value = self.compute(m, d);
                self.rows[m as usize].push(value);
            }
        }
        Ok(())
    }

    fn at(&self, m: u32, d: u32) -> &Rational {
        &self.rows[m as usize][d as usize - 1]
    }

    fn compute(&self, m: u32, d: u32) -> Rational {
        if m == 0 || d == 1 {
            return Rational::one();
        }
        match self.recurrence {
            Recurrence::MultiTerm => self.multi_term(m, d),
            Recurrence::TwoTerm => self.two_term(m, d),
            Recurrence::IteratedSum => self.iterated_sum(m, d),
        }
    }

    // M(m,d) = sum_k (d-1)/d^k * m!/(m-k)! * (m+d-k-2)!/(m+d-1)! * M(m-k, d-1)
    //
    // Coefficient c_0 = (d-1)/(m+d-1), then c_{k+1} = c_k * (m-k) / (d (m+d-k-2)).
    fn multi_term(&self, m: u32, d: u32) -> Rational {
        let (m64, d64) = (u64::from(m), u64::from(d));
        let mut coef = ratio(d64 - 1, m64 + d64 - 1);
        let mut sum = Rational::zero();
        for k in 0..=m64 {
            sum += &coef * self.at(m - k as u32, d - 1);
            if k < m64 {
                coef *= ratio(m64 - k, d64 * (m64 + d64 - k - 2));
            }
        }
        sum
    }

    // M(m,d) = (d-1)/(m+d-1) M(m,d-1) + m/(d(m+d-1)) M(m-1,d)
    fn two_term(&self, m: u32, d: u32) -> Rational {
        let (m64, d64) = (u64::from(m), u64::from(d));
        ratio(d64 - 1, m64 + d64 - 1) * self.at(m, d - 1)
            + ratio(m64, d64 * (m64 + d64 - 1)) * self.at(m - 1, d)
    }

    // M(m,d) = m/(m+d-1) sum_{j=1}^{d} (d-1)!/j! * (m+j-2)!/(m+d-2)! * M(m-1, j)
    //
    // Coefficient a_d = 1/d, then a_{j-1} = a_j * j / (m+j-2).
    fn iterated_sum(&self, m: u32, d: u32) -> Rational {
        let (m64, d64) = (u64::from(m), u64::from(d));
        let mut coef = ratio(1, d64);
        let mut sum = Rational::zero();
        for j in (1..=d64).rev() {
            sum += &coef * self.at(m - 1, j as u32);
            if j > 1 {
                coef *= ratio(j, m64 + j - 2);
            }
        }
        sum * ratio(m64, m64 + d64 - 1)
    }

    // Fault injection for the verification suite.
    pub(crate) fn corrupt_entry(&mut self, m: u32, d: u32, value: Rational) {
        if let Some(slot) = self
            .rows
            .get_mut(m as usize)
            .and_then(|row| row.get_mut(d as usize - 1))
        {
            *slot = value;
        }
    }
}

/// Fully populated table for `0 <= m <= m_max`, `1 <= d <= d_max`.
pub fn moment_table(m_max: u32, d_max: u32, recurrence: Recurrence) -> Result<MomentTable> {
    MomentTable::build(m_max, d_max, recurrence, TableLimits::default())
}

/// `M(m, d)` computed with the chosen recurrence on a cold table.
pub fn limiting_moment(m: u32, d: u32, recurrence: Recurrence) -> Result<Rational> {
    check_bins(d)?;
    if m == 0 || d == 1 {
        return Ok(Rational::one());
    }
    let table = MomentTable::build(m, d, recurrence, TableLimits::default())?;
    Ok(table.at(m, d).clone())
}

/// The harmonic numbers `H_1, H_2, ...` as exact rationals.
pub fn harmonic_numbers() -> impl Iterator<Item = Rational> {
    let mut acc = Rational::zero();
    (1u64..).map(move |k| {
        acc += ratio(1, k);
        acc.clone()
    })
}

/// `H_d / d` for `d = 1, 2, ...`, each the correctly rounded `f64` of the
/// exact value.
///
/// `H_k` is carried as `num / lcm(1..=k)` without reduction, so each step
/// costs a few big-by-small operations instead of a big gcd.
pub fn mean_fractions_f64() -> impl Iterator<Item = f64> {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    (1u64..).map(move |k| {
        let rem = (&den % k).to_u64().expect("remainder below k");
        let factor = k / num_integer::gcd(rem, k);
        if factor > 1 {
            den *= factor;
            num *= factor;
        }
        num += &den / k;
        let mean = Rational::new_raw(num.clone(), &den * k);
        mean.to_f64().unwrap_or(f64::NAN)
    })
}

/// `H_d = 1 + 1/2 + ... + 1/d`.
pub fn harmonic(d: u32) -> Result<Rational> {
    check_bins(d)?;
    Ok(harmonic_numbers().nth(d as usize - 1).expect("unbounded iterator"))
}

/// Closed-form limiting mean `H_d / d`.
pub fn mean_fraction(d: u32) -> Result<Rational> {
    Ok(harmonic(d)? / BigInt::from(d))
}

/// Closed-form limiting second moment `2/(d(d+1)) * sum_{j<=d} H_j / j`.
pub fn second_moment(d: u32) -> Result<Rational> {
    check_bins(d)?;
    let sum = harmonic_numbers()
        .take(d as usize)
        .enumerate()
        .fold(Rational::zero(), |acc, (i, h)| acc + h / BigInt::from(i + 1));
    let d64 = u64::from(d);
    Ok(sum * ratio(2, d64 * (d64 + 1)))
}

/// `((ln d) / d, (ln d + 1) / d)`, which brackets [`mean_fraction`].
pub fn mean_bounds(d: u32) -> Result<(f64, f64)> {
    check_bins(d)?;
    let d = f64::from(d);
    Ok((d.ln() / d, (d.ln() + 1.0) / d))
}

/// Standard deviation over mean of the limiting fraction. Everything up to
/// the variance is exact; only the final square root is taken in `f64`.
pub fn coefficient_of_variation(d: u32) -> Result<f64> {
    let mean = mean_fraction(d)?;
    let variance = second_moment(d)? - &mean * &mean;
    let cv2 = variance / (&mean * &mean);
    Ok(to_f64(&cv2).sqrt())
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
