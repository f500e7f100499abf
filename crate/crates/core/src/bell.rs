//! Clauser-Horne and spin Bell functionals over binned phase outcomes.
//!
//! Both functionals come in a general four-angle form and a factorized
//! single-angle form. Factorization applies because every joint
//! probability depends on the reference phases only through their sum:
//! with settings chosen so the four sums are `psi`, `3*psi`, `-psi`,
//! `psi`, the four-angle combinations collapse to
//!
//! ```text
//! B_CH = [2 P_uu(psi) + P_uu(-psi) - P_uu(3 psi)] / (2 P_up)
//! B_S  =  2 E(psi)    + E(-psi)    - E(3 psi)
//! ```
//!
//! Evaluation goes through [`BinnedSystem`], which preprocesses one
//! (state, resolution, scheme) combination so that each binned table
//! costs `O(s)` per angle instead of `O(s^4)`; dense angle sweeps at
//! `s ~ 200` stay cheap. [`bin_distribution`](crate::binning::bin_distribution)
//! over the materialized table is the slow reference route; the two are
//! held together by property tests.

use std::f64::consts::TAU;

use crate::binning::{BinaryJointTable, BinningScheme};
use crate::error::{Error, Result};
use crate::fock::CoefficientVector;
use crate::kahan::{kahan_sum, KahanSum};
use crate::phase::NormalizationMode;

/// The four analyzer reference phases of a Bell experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleSet {
    pub theta1: f64,
    pub theta1p: f64,
    pub theta2: f64,
    pub theta2p: f64,
}

impl AngleSet {
    /// Settings whose four sums realize the factorized form at `psi`:
    /// `theta1 + theta2 = psi`, `theta1 + theta2p = 3*psi`,
    /// `theta1p + theta2 = -psi`, `theta1p + theta2p = psi`.
    pub fn factorized(psi: f64) -> Self {
        Self {
            theta1: 0.0,
            theta1p: -2.0 * psi,
            theta2: psi,
            theta2p: 3.0 * psi,
        }
    }
}

/// Which Bell functional to optimize.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Functional {
    Ch,
    S,
}

/// One evaluated pair of Bell functionals with its violation flags.
#[derive(Clone, Copy, Debug)]
pub struct BellEvaluation {
    pub b_ch: f64,
    pub b_s: f64,
    pub psi0: f64,
    pub angles: Option<AngleSet>,
    pub mode: NormalizationMode,
    pub violates_ch: bool,
    pub violates_s: bool,
}

impl BellEvaluation {
    /// Violation flags are always derived from the values: `|B_CH| > 1`
    /// and `|B_S| > 2`.
    pub fn new(
        b_ch: f64,
        b_s: f64,
        psi0: f64,
        angles: Option<AngleSet>,
        mode: NormalizationMode,
    ) -> Self {
        Self {
            b_ch,
            b_s,
            psi0,
            angles,
            mode,
            violates_ch: b_ch.abs() > 1.0,
            violates_s: b_s.abs() > 2.0,
        }
    }
}

/// Correlation function `E = P_uu + P_dd - P_ud - P_du`.
///
/// Raw cell arithmetic: in projected-raw mode the cells sum to the
/// retained mass, not 1, and `E` is deliberately not rescaled.
pub fn correlation_e(table: &BinaryJointTable) -> f64 {
    table.p_uu + table.p_dd - table.p_ud - table.p_du
}

const CELL_UU: usize = 0;
const CELL_UD: usize = 1;
const CELL_DU: usize = 2;
const CELL_DD: usize = 3;

/// Preprocessed binned-probability evaluator for one combination of
/// state, resolution, scheme, and normalization mode.
///
/// The joint probability depends on the outcome pair only through
/// `k = (mu1 + mu2) mod (s+1)` and on the pair `(n, n')` only through
/// `d = n - n'`, so each binned cell is
///
/// ```text
/// cell(psi0) = N_cell * mass / (s+1)^2
///   + 2/(s+1)^2 * sum_d S_d [C_d cos(d psi0) - D_d sin(d psi0)]
/// ```
///
/// with `S_d = sum_n c_(n+d) c_n` and `(C_d, D_d)` the cosine/sine
/// sums of the cell's residue-class counts. Everything except the
/// `cos(d psi0)` factors is fixed at construction.
pub struct BinnedSystem {
    s: usize,
    mode: NormalizationMode,
    mass: f64,
    up_len: usize,
    pair_sums: Vec<f64>,   // S_d at index d; index 0 unused
    cos_w: [Vec<f64>; 4],  // C_d per cell
    sin_w: [Vec<f64>; 4],  // D_d per cell
    cell_counts: [f64; 4], // number of (mu1, mu2) pairs per cell
}

impl BinnedSystem {
    pub fn new(
        state: &CoefficientVector,
        s: usize,
        scheme: &BinningScheme,
        mode: NormalizationMode,
    ) -> Result<Self> {
        if scheme.s() != s {
            return Err(Error::ResolutionMismatch {
                scheme_s: scheme.s(),
                dist_s: s,
            });
        }
        let coeffs = state.projected(s);
        let mass = state.projected_mass(s);
        if mode == NormalizationMode::Renormalized && mass <= 0.0 {
            return Err(Error::ZeroMass);
        }

        let mut pair_sums = vec![0.0; s + 1];
        for d in 1..coeffs.len() {
            pair_sums[d] = kahan_sum((0..coeffs.len() - d).map(|n| coeffs[n + d] * coeffs[n]));
        }

        let dim = s + 1;
        let up: Vec<bool> = (0..dim).map(|mu| scheme.is_up(mu)).collect();
        let mut counts = [
            vec![0.0; dim],
            vec![0.0; dim],
            vec![0.0; dim],
            vec![0.0; dim],
        ];
        for mu1 in 0..dim {
            for mu2 in 0..dim {
                let cell = match (up[mu1], up[mu2]) {
                    (true, true) => CELL_UU,
                    (true, false) => CELL_UD,
                    (false, true) => CELL_DU,
                    (false, false) => CELL_DD,
                };
                counts[cell][(mu1 + mu2) % dim] += 1.0;
            }
        }
        let cell_counts = [
            kahan_sum(counts[CELL_UU].iter().copied()),
            kahan_sum(counts[CELL_UD].iter().copied()),
            kahan_sum(counts[CELL_DU].iter().copied()),
            kahan_sum(counts[CELL_DD].iter().copied()),
        ];

        // d*k only matters modulo dim, so tabulate the dim roots of unity
        let unit: Vec<(f64, f64)> = (0..dim)
            .map(|j| (TAU * j as f64 / dim as f64).sin_cos())
            .collect();
        let mut cos_w: [Vec<f64>; 4] = Default::default();
        let mut sin_w: [Vec<f64>; 4] = Default::default();
        for cell in 0..4 {
            let mut cw = vec![0.0; s + 1];
            let mut sw = vec![0.0; s + 1];
            for (d, (cw_d, sw_d)) in cw.iter_mut().zip(sw.iter_mut()).enumerate().skip(1) {
                let mut cacc = KahanSum::new();
                let mut sacc = KahanSum::new();
                for (k, &n_k) in counts[cell].iter().enumerate() {
                    if n_k == 0.0 {
                        continue;
                    }
                    let (sin_a, cos_a) = unit[(d * k) % dim];
                    cacc.add(n_k * cos_a);
                    sacc.add(n_k * sin_a);
                }
                *cw_d = cacc.value();
                *sw_d = sacc.value();
            }
            cos_w[cell] = cw;
            sin_w[cell] = sw;
        }

        Ok(Self {
            s,
            mode,
            mass,
            up_len: scheme.up_len(),
            pair_sums,
            cos_w,
            sin_w,
            cell_counts,
        })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn mode(&self) -> NormalizationMode {
        self.mode
    }

    /// Retained mass of the projection onto `n <= s`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    fn finish(&self, raw: f64) -> f64 {
        match self.mode {
            NormalizationMode::ProjectedRaw => raw,
            NormalizationMode::Renormalized => raw / self.mass,
        }
    }

    /// All four binned cells at the angle sum `psi0`.
    pub fn table_at(&self, psi0: f64) -> BinaryJointTable {
        let dim = (self.s + 1) as f64;
        let mut acc: [KahanSum; 4] = Default::default();
        for (cell, acc_cell) in acc.iter_mut().enumerate() {
            acc_cell.add(self.cell_counts[cell] * self.mass);
        }
        for d in 1..=self.s {
            let s_d = self.pair_sums[d];
            if s_d == 0.0 {
                continue;
            }
            let (sin_d, cos_d) = (d as f64 * psi0).sin_cos();
            for (cell, acc_cell) in acc.iter_mut().enumerate() {
                acc_cell
                    .add(2.0 * s_d * (self.cos_w[cell][d] * cos_d - self.sin_w[cell][d] * sin_d));
            }
        }
        let cell = |i: usize| self.finish(acc[i].value() / (dim * dim));
        let (p_uu, p_ud, p_du, p_dd) = (cell(CELL_UU), cell(CELL_UD), cell(CELL_DU), cell(CELL_DD));
        BinaryJointTable {
            p_uu,
            p_ud,
            p_du,
            p_dd,
            p_u1: p_uu + p_ud,
            p_u2: p_uu + p_du,
            total_mass: p_uu + p_ud + p_du + p_dd,
            psi0,
        }
    }

    /// The up-up cell alone (what the CH numerator needs).
    pub fn p_uu_at(&self, psi0: f64) -> f64 {
        let dim = (self.s + 1) as f64;
        let mut acc = KahanSum::new();
        acc.add(self.cell_counts[CELL_UU] * self.mass);
        for d in 1..=self.s {
            let s_d = self.pair_sums[d];
            if s_d == 0.0 {
                continue;
            }
            let (sin_d, cos_d) = (d as f64 * psi0).sin_cos();
            acc.add(2.0 * s_d * (self.cos_w[CELL_UU][d] * cos_d - self.sin_w[CELL_UU][d] * sin_d));
        }
        self.finish(acc.value() / (dim * dim))
    }

    /// Angle-independent single-mode up marginal.
    pub fn p_up(&self) -> f64 {
        let frac = self.up_len as f64 / (self.s as f64 + 1.0);
        match self.mode {
            NormalizationMode::ProjectedRaw => frac * self.mass,
            NormalizationMode::Renormalized => frac,
        }
    }

    /// Factorized Clauser-Horne ratio at angle sum `psi0`.
    pub fn b_ch(&self, psi0: f64) -> Result<f64> {
        let p_up = self.p_up();
        if p_up <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let num = 2.0 * self.p_uu_at(psi0) + self.p_uu_at(-psi0) - self.p_uu_at(3.0 * psi0);
        Ok(num / (2.0 * p_up))
    }

    /// Factorized spin combination at angle sum `psi0`.
    pub fn b_s(&self, psi0: f64) -> f64 {
        let e = |a: f64| correlation_e(&self.table_at(a));
        2.0 * e(psi0) + e(-psi0) - e(3.0 * psi0)
    }
}

/// `[2 P_uu(psi0) + P_uu(-psi0) - P_uu(3 psi0)] / (2 P_up)`.
pub fn bell_ch_factorized(
    state: &CoefficientVector,
    s: usize,
    scheme: &BinningScheme,
    psi0: f64,
    mode: NormalizationMode,
) -> Result<f64> {
    BinnedSystem::new(state, s, scheme, mode)?.b_ch(psi0)
}

/// `2 E(psi0) + E(-psi0) - E(3 psi0)`.
pub fn bell_s_factorized(
    state: &CoefficientVector,
    s: usize,
    scheme: &BinningScheme,
    psi0: f64,
    mode: NormalizationMode,
) -> Result<f64> {
    Ok(BinnedSystem::new(state, s, scheme, mode)?.b_s(psi0))
}

/// Four-angle Clauser-Horne ratio
/// `[P_uu(t1,t2) - P_uu(t1,t2') + P_uu(t1',t2) + P_uu(t1',t2')] /
///  [P_up(t1') + P_up(t2)]`.
///
/// Joint cells depend only on setting sums and the up marginal on no
/// setting at all, so the denominator is `2 P_up`.
pub fn bell_ch_general(
    state: &CoefficientVector,
    s: usize,
    scheme: &BinningScheme,
    angles: &AngleSet,
    mode: NormalizationMode,
) -> Result<f64> {
    let sys = BinnedSystem::new(state, s, scheme, mode)?;
    let den = 2.0 * sys.p_up();
    if den <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let p = |a: f64, b: f64| sys.p_uu_at(a + b);
    let num = p(angles.theta1, angles.theta2) - p(angles.theta1, angles.theta2p)
        + p(angles.theta1p, angles.theta2)
        + p(angles.theta1p, angles.theta2p);
    Ok(num / den)
}

/// Four-angle spin combination
/// `E(t1,t2) - E(t1,t2') + E(t1',t2) + E(t1',t2')`.
pub fn bell_s_general(
    state: &CoefficientVector,
    s: usize,
    scheme: &BinningScheme,
    angles: &AngleSet,
    mode: NormalizationMode,
) -> Result<f64> {
    let sys = BinnedSystem::new(state, s, scheme, mode)?;
    let e = |a: f64, b: f64| correlation_e(&sys.table_at(a + b));
    Ok(
        e(angles.theta1, angles.theta2) - e(angles.theta1, angles.theta2p)
            + e(angles.theta1p, angles.theta2)
            + e(angles.theta1p, angles.theta2p),
    )
}

/// Upper end of the factorized-angle search range. The functionals
/// involve `3*psi0`, so settings are distinct only on `[0, 2*pi/3]`.
pub const PSI0_MAX: f64 = 2.0 * std::f64::consts::FRAC_PI_3;

/// Grid density used by [`optimize_psi`].
pub const DEFAULT_OPT_GRID: usize = 2000;

/// Width of the refined bracket at which golden-section search stops.
pub const OPT_PSI_TOL: f64 = 1e-10;

/// Deterministic maximizer over `psi0` in `[0, PSI0_MAX]`: a dense grid
/// scan (ties resolved toward the smallest angle) followed by
/// golden-section refinement of the winning bracket down to
/// [`OPT_PSI_TOL`]. Returns `(argmax, max)`.
pub fn maximize_over_psi<F>(objective: F, grid_points: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    assert!(grid_points >= 2, "need at least two grid points");
    let step = PSI0_MAX / (grid_points - 1) as f64;
    let mut best_i = 0usize;
    let mut best_v = objective(0.0)?;
    for i in 1..grid_points {
        let v = objective(i as f64 * step)?;
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }

    let mut a = if best_i == 0 {
        0.0
    } else {
        (best_i - 1) as f64 * step
    };
    let mut b = (best_i + 1).min(grid_points - 1) as f64 * step;
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    while b - a > OPT_PSI_TOL {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = objective(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = objective(x2)?;
        }
    }
    let mid = 0.5 * (a + b);
    let f_mid = objective(mid)?;
    // fall back to the grid winner unless refinement strictly improved it,
    // which keeps flat objectives pinned at the smallest angle
    if f_mid > best_v {
        Ok((mid, f_mid))
    } else {
        Ok((best_i as f64 * step, best_v))
    }
}

/// Maximize the chosen functional over `psi0 in [0, 2*pi/3]` and report
/// both functional values at the winning angle.
pub fn optimize_psi(
    state: &CoefficientVector,
    s: usize,
    scheme: &BinningScheme,
    functional: Functional,
    mode: NormalizationMode,
) -> Result<BellEvaluation> {
    let sys = BinnedSystem::new(state, s, scheme, mode)?;
    let (psi0, _) = match functional {
        Functional::Ch => maximize_over_psi(|x| sys.b_ch(x), DEFAULT_OPT_GRID)?,
        Functional::S => maximize_over_psi(|x| Ok(sys.b_s(x)), DEFAULT_OPT_GRID)?,
    };
    let b_ch = sys.b_ch(psi0)?;
    let b_s = sys.b_s(psi0);
    Ok(BellEvaluation::new(b_ch, b_s, psi0, None, mode))
}
