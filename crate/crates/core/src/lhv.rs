//! Classical bounds by exhaustive local-hidden-variable enumeration.
//!
//! For two settings per side and binary outcomes, every local
//! hidden-variable model is a convex mixture of the 16 deterministic
//! strategies, so scanning those extremal points is an exact check of
//! the bounds `|B_S| <= 2` and `B_CH <= 1`.

use crate::binning::BinaryJointTable;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Up,
    Down,
}

impl Outcome {
    fn is_up(self) -> bool {
        self == Outcome::Up
    }
}

/// One deterministic outcome assignment: what each side answers at each
/// of its two settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeterministicStrategy {
    pub a: Outcome,
    pub a_p: Outcome,
    pub b: Outcome,
    pub b_p: Outcome,
}

impl DeterministicStrategy {
    /// All 16 strategies in a fixed order (bit i of the index drives
    /// one slot, `Up` on a set bit).
    pub fn all() -> [DeterministicStrategy; 16] {
        let mut out = [DeterministicStrategy {
            a: Outcome::Down,
            a_p: Outcome::Down,
            b: Outcome::Down,
            b_p: Outcome::Down,
        }; 16];
        for (bits, slot) in out.iter_mut().enumerate() {
            let pick = |bit: usize| {
                if bits >> bit & 1 == 1 {
                    Outcome::Up
                } else {
                    Outcome::Down
                }
            };
            *slot = DeterministicStrategy {
                a: pick(0),
                a_p: pick(1),
                b: pick(2),
                b_p: pick(3),
            };
        }
        out
    }

    /// Deterministic 2x2 table for one pair of fixed outcomes.
    fn table(x: Outcome, y: Outcome) -> BinaryJointTable {
        let (u1, u2) = (x.is_up(), y.is_up());
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        BinaryJointTable {
            p_uu: ind(u1 && u2),
            p_ud: ind(u1 && !u2),
            p_du: ind(!u1 && u2),
            p_dd: ind(!u1 && !u2),
            p_u1: ind(u1),
            p_u2: ind(u2),
            total_mass: 1.0,
            psi0: 0.0,
        }
    }

    /// Tables at the four setting pairs, in the order
    /// `(a,b), (a,b'), (a',b), (a',b')`.
    pub fn setting_tables(&self) -> [BinaryJointTable; 4] {
        [
            Self::table(self.a, self.b),
            Self::table(self.a, self.b_p),
            Self::table(self.a_p, self.b),
            Self::table(self.a_p, self.b_p),
        ]
    }
}

fn bell_s_of(tables: &[BinaryJointTable; 4]) -> f64 {
    let e = |t: &BinaryJointTable| crate::bell::correlation_e(t);
    e(&tables[0]) - e(&tables[1]) + e(&tables[2]) + e(&tables[3])
}

fn ch_parts_of(tables: &[BinaryJointTable; 4]) -> (f64, f64) {
    let num = tables[0].p_uu - tables[1].p_uu + tables[2].p_uu + tables[3].p_uu;
    // denominator: P_up at setting a' plus P_up at setting b
    let den = tables[2].p_u1 + tables[0].p_u2;
    (num, den)
}

/// Scan all 16 deterministic strategies and return
/// `(max |B_S|, max |B_CH|)`, skipping CH ratios whose denominator is
/// zero. The result is exactly `(2, 1)`.
pub fn enumerate_lhv_bounds() -> (f64, f64) {
    let mut max_bs = 0.0_f64;
    let mut max_ch = 0.0_f64;
    for strategy in DeterministicStrategy::all() {
        let tables = strategy.setting_tables();
        max_bs = max_bs.max(bell_s_of(&tables).abs());
        let (num, den) = ch_parts_of(&tables);
        if den > 0.0 {
            max_ch = max_ch.max((num / den).abs());
        }
    }
    (max_bs, max_ch)
}

/// Evaluate a convex mixture of the 16 deterministic strategies.
///
/// Returns `(B_S, CH numerator, CH denominator)` so the caller can
/// check `|B_S| <= 2` and `num <= den` without dividing by a possibly
/// tiny denominator.
pub fn mixture_check(weights: &[f64; 16]) -> Result<(f64, f64, f64)> {
    let mut sum = 0.0;
    for &w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidWeights(format!(
                "weights must be finite and nonnegative, got {w}"
            )));
        }
        sum += w;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidWeights(format!(
            "weights must sum to 1, got {sum}"
        )));
    }

    let strategies = DeterministicStrategy::all();
    let mut mixed = [BinaryJointTable {
        p_uu: 0.0,
        p_ud: 0.0,
        p_du: 0.0,
        p_dd: 0.0,
        p_u1: 0.0,
        p_u2: 0.0,
        total_mass: 0.0,
        psi0: 0.0,
    }; 4];
    for (strategy, &w) in strategies.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        for (acc, t) in mixed.iter_mut().zip(strategy.setting_tables()) {
            acc.p_uu += w * t.p_uu;
            acc.p_ud += w * t.p_ud;
            acc.p_du += w * t.p_du;
            acc.p_dd += w * t.p_dd;
            acc.p_u1 += w * t.p_u1;
            acc.p_u2 += w * t.p_u2;
            acc.total_mass += w * t.total_mass;
        }
    }
    let bs = bell_s_of(&mixed);
    let (num, den) = ch_parts_of(&mixed);
    Ok((bs, num, den))
}
