//! Joint and marginal distributions for discrete phase measurements.
//!
//! A measurement of resolution `s` has `s+1` orthonormal phase outcomes
//! per mode, uniformly spaced by `2*pi/(s+1)` above a per-mode reference
//! phase. For a pair state `sum_n c_n |n>|n>` the joint outcome
//! probability depends on the reference phases only through their sum
//! `psi0` and on the outcome pair only through `(mu1 + mu2) mod (s+1)`.
//!
//! Two independent evaluation routes are provided: the closed-form pair
//! sum ([`joint_prob`]) and a direct amplitude computation
//! ([`oracle_joint_prob`]) used to cross-check it.

use std::f64::consts::TAU;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::fock::CoefficientVector;
use crate::kahan::{kahan_sum, KahanSum};

/// Entries in `(-NEG_PROB_FLOOR, 0)` are rounding residue and clamp to
/// zero; anything lower is treated as a hard numeric error.
pub const NEG_PROB_FLOOR: f64 = 1e-14;

/// How probabilities of a state projected onto `n <= s` are reported.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NormalizationMode {
    /// Keep raw projected values; the table mass is the retained norm
    /// `sum_{n<=s} c_n^2`, which exposes any leaked amplitude.
    #[default]
    ProjectedRaw,
    /// Divide by the retained norm so the table sums to one.
    Renormalized,
}

/// Measurement grid: resolution `s` (giving `s+1` outcomes per mode)
/// and the two reference phases.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseGrid {
    pub s: usize,
    pub theta0_1: f64,
    pub theta0_2: f64,
}

impl PhaseGrid {
    pub fn new(s: usize, theta0_1: f64, theta0_2: f64) -> Self {
        Self {
            s,
            theta0_1,
            theta0_2,
        }
    }

    /// Number of outcomes per mode.
    pub fn outcomes(&self) -> usize {
        self.s + 1
    }

    /// Outcome phase `theta0_1 + 2*mu*pi/(s+1)` on mode 1.
    pub fn theta_1(&self, mu: usize) -> f64 {
        self.theta0_1 + TAU * mu as f64 / (self.s as f64 + 1.0)
    }

    /// Outcome phase `theta0_2 + 2*mu*pi/(s+1)` on mode 2.
    pub fn theta_2(&self, mu: usize) -> f64 {
        self.theta0_2 + TAU * mu as f64 / (self.s as f64 + 1.0)
    }

    /// The only angular combination that enters any probability.
    pub fn psi0(&self) -> f64 {
        self.theta0_1 + self.theta0_2
    }

    fn check_outcome(&self, mu: usize) -> Result<()> {
        if mu > self.s {
            Err(Error::OutcomeOutOfRange { mu, s: self.s })
        } else {
            Ok(())
        }
    }
}

/// Full `(s+1) x (s+1)` joint outcome table plus bookkeeping.
#[derive(Clone, Debug)]
pub struct JointPhaseDistribution {
    grid: PhaseGrid,
    table: Vec<f64>, // row-major, entry (mu1, mu2) at mu1*(s+1) + mu2
    total_mass: f64,
    mode: NormalizationMode,
}

impl JointPhaseDistribution {
    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn s(&self) -> usize {
        self.grid.s
    }

    pub fn mode(&self) -> NormalizationMode {
        self.mode
    }

    /// Sum of all table entries.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn prob(&self, mu1: usize, mu2: usize) -> Result<f64> {
        self.grid.check_outcome(mu1)?;
        self.grid.check_outcome(mu2)?;
        Ok(self.table[mu1 * self.grid.outcomes() + mu2])
    }

    /// Row sum `sum_{mu2} P(mu1, mu2)`.
    pub fn row_sum(&self, mu1: usize) -> Result<f64> {
        self.grid.check_outcome(mu1)?;
        let dim = self.grid.outcomes();
        Ok(kahan_sum(
            self.table[mu1 * dim..(mu1 + 1) * dim].iter().copied(),
        ))
    }

    /// CSV dump: header `mu1,mu2,p`, one row per outcome pair,
    /// probabilities printed with 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "mu1,mu2,p")?;
        let dim = self.grid.outcomes();
        for mu1 in 0..dim {
            for mu2 in 0..dim {
                writeln!(w, "{},{},{:.16e}", mu1, mu2, self.table[mu1 * dim + mu2])?;
            }
        }
        Ok(())
    }
}

/// Clamp rounding residue to zero, reject anything genuinely negative.
fn clamp_prob(p: f64) -> Result<f64> {
    if p >= 0.0 {
        Ok(p)
    } else if p > -NEG_PROB_FLOOR {
        Ok(0.0)
    } else {
        Err(Error::NegativeProbability(p))
    }
}

/// Closed-form probability of the class `k = (mu1 + mu2) mod (s+1)`:
/// `mass/(s+1)^2 + sum_{n>n'} 2 c_n c_n' cos[(n-n')(2*pi*k/(s+1) + psi0)]/(s+1)^2`,
/// summed in increasing `n` with compensated summation.
fn class_prob(
    coeffs: &[f64],
    s: usize,
    k: usize,
    psi0: f64,
    mass: f64,
    mode: NormalizationMode,
) -> Result<f64> {
    let dim = s as f64 + 1.0;
    let angle = psi0 + TAU * k as f64 / dim;
    let mut acc = KahanSum::new();
    acc.add(mass);
    for n in 1..coeffs.len() {
        for np in 0..n {
            let dn = (n - np) as f64;
            acc.add(2.0 * coeffs[n] * coeffs[np] * (dn * angle).cos());
        }
    }
    let p = clamp_prob(acc.value() / (dim * dim))?;
    match mode {
        NormalizationMode::ProjectedRaw => Ok(p),
        NormalizationMode::Renormalized => {
            if mass <= 0.0 {
                Err(Error::ZeroMass)
            } else {
                Ok(p / mass)
            }
        }
    }
}

/// Joint probability of outcomes `(mu1, mu2)` for `state` projected
/// onto `n <= s`, via the closed-form pair sum.
pub fn joint_prob(
    state: &CoefficientVector,
    grid: &PhaseGrid,
    mu1: usize,
    mu2: usize,
    mode: NormalizationMode,
) -> Result<f64> {
    grid.check_outcome(mu1)?;
    grid.check_outcome(mu2)?;
    let k = (mu1 + mu2) % grid.outcomes();
    class_prob(
        state.projected(grid.s),
        grid.s,
        k,
        grid.psi0(),
        state.projected_mass(grid.s),
        mode,
    )
}

/// Tabulate the joint probability over all `(s+1)^2` outcome pairs.
///
/// Entries are filled from the `s+1` residue classes of `mu1 + mu2`,
/// so the translation invariance of the closed form holds exactly in
/// the table.
pub fn joint_distribution(
    state: &CoefficientVector,
    grid: &PhaseGrid,
    mode: NormalizationMode,
) -> Result<JointPhaseDistribution> {
    let dim = grid.outcomes();
    let coeffs = state.projected(grid.s);
    let mass = state.projected_mass(grid.s);
    let class: Vec<f64> = (0..dim)
        .map(|k| class_prob(coeffs, grid.s, k, grid.psi0(), mass, mode))
        .collect::<Result<_>>()?;
    let mut table = vec![0.0; dim * dim];
    for mu1 in 0..dim {
        for mu2 in 0..dim {
            table[mu1 * dim + mu2] = class[(mu1 + mu2) % dim];
        }
    }
    let total_mass = kahan_sum(table.iter().copied());
    Ok(JointPhaseDistribution {
        grid: *grid,
        table,
        total_mass,
        mode,
    })
}

/// Single-mode marginal probability of any one outcome.
///
/// Independent of the outcome index and of both reference phases:
/// `sum_{n<=s} c_n^2 / (s+1)` raw, `1/(s+1)` renormalized.
pub fn marginal_prob(state: &CoefficientVector, grid: &PhaseGrid, mode: NormalizationMode) -> f64 {
    let dim = grid.s as f64 + 1.0;
    match mode {
        NormalizationMode::ProjectedRaw => state.projected_mass(grid.s) / dim,
        NormalizationMode::Renormalized => 1.0 / dim,
    }
}

/// Verification oracle: the same joint probability computed straight
/// from the complex amplitude
/// `A = sum_n c_n exp[-i n (theta_mu1 + theta_mu2)] / (s+1)`,
/// returning `|A|^2` (the raw projected value). No code is shared with
/// the closed-form route.
pub fn oracle_joint_prob(
    state: &CoefficientVector,
    grid: &PhaseGrid,
    mu1: usize,
    mu2: usize,
) -> Result<f64> {
    grid.check_outcome(mu1)?;
    grid.check_outcome(mu2)?;
    let dim = grid.s as f64 + 1.0;
    let phi = grid.theta_1(mu1) + grid.theta_2(mu2);
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for (n, &cn) in state.projected(grid.s).iter().enumerate() {
        let arg = n as f64 * phi;
        re.add(cn * arg.cos());
        im.add(-cn * arg.sin());
    }
    let re = re.value() / dim;
    let im = im.value() / dim;
    Ok(re * re + im * im)
}
