//! Binary reduction of multi-outcome phase results.
//!
//! Bell tests need two outcomes per side, so the `s+1` phase results of
//! each mode are binned into "up" and "down". Both modes always use the
//! same scheme.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fock::CoefficientVector;
use crate::kahan::KahanSum;
use crate::phase::{JointPhaseDistribution, NormalizationMode, PhaseGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    /// Half the outcomes go up; for even `s` the extra outcome goes down.
    EqualSplit,
    /// Only the `mu = 0` outcome goes up.
    SingleState,
    /// Caller-chosen up set.
    Custom,
}

/// Per-mode map from outcome index to the binary up/down label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinningScheme {
    kind: SchemeKind,
    s: usize,
    up_set: Vec<usize>, // sorted, nonempty, proper subset of 0..=s
}

impl BinningScheme {
    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn up_set(&self) -> &[usize] {
        &self.up_set
    }

    pub fn up_len(&self) -> usize {
        self.up_set.len()
    }

    pub fn is_up(&self, mu: usize) -> bool {
        self.up_set.binary_search(&mu).is_ok()
    }

    /// The same split with up and down exchanged (a custom scheme).
    pub fn complement(&self) -> BinningScheme {
        let down: Vec<usize> = (0..=self.s).filter(|mu| !self.is_up(*mu)).collect();
        BinningScheme {
            kind: SchemeKind::Custom,
            s: self.s,
            up_set: down,
        }
    }

    /// CLI-facing label: `equal`, `single`, or `custom:0,1,4`.
    pub fn label(&self) -> String {
        match self.kind {
            SchemeKind::EqualSplit => "equal".to_string(),
            SchemeKind::SingleState => "single".to_string(),
            SchemeKind::Custom => {
                let idx: Vec<String> = self.up_set.iter().map(|m| m.to_string()).collect();
                format!("custom:{}", idx.join(","))
            }
        }
    }
}

impl fmt::Display for BinningScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Build a binning scheme for resolution `s`.
///
/// `EqualSplit` takes `mu = 0..=(s-1)/2` up for odd `s` and
/// `mu = 0..=s/2-1` for even `s` (the extra outcome goes down).
/// `SingleState` takes only `mu = 0` up. `Custom` takes the provided
/// indices, which must form a nonempty proper subset of `0..=s`.
pub fn make_scheme(
    kind: SchemeKind,
    s: usize,
    custom_up: Option<&[usize]>,
) -> Result<BinningScheme> {
    if s == 0 {
        return Err(Error::InvalidScheme(
            "no binary split exists for s = 0 (a single outcome)".to_string(),
        ));
    }
    let up_set: Vec<usize> = match kind {
        SchemeKind::EqualSplit | SchemeKind::SingleState => {
            if custom_up.is_some() {
                return Err(Error::InvalidScheme(
                    "custom up set only applies to the custom kind".to_string(),
                ));
            }
            match kind {
                SchemeKind::EqualSplit => {
                    let top = if s % 2 == 1 { (s - 1) / 2 } else { s / 2 - 1 };
                    (0..=top).collect()
                }
                SchemeKind::SingleState => vec![0],
                SchemeKind::Custom => unreachable!(),
            }
        }
        SchemeKind::Custom => {
            let given = custom_up.ok_or_else(|| {
                Error::InvalidScheme("custom kind needs an explicit up set".to_string())
            })?;
            let set: BTreeSet<usize> = given.iter().copied().collect();
            if set.is_empty() {
                return Err(Error::InvalidScheme("up set is empty".to_string()));
            }
            if let Some(&max) = set.iter().next_back() {
                if max > s {
                    return Err(Error::InvalidScheme(format!(
                        "up index {max} out of range for s={s}"
                    )));
                }
            }
            if set.len() == s + 1 {
                return Err(Error::InvalidScheme(
                    "up set must be a proper subset (some outcome must stay down)".to_string(),
                ));
            }
            set.into_iter().collect()
        }
    };
    Ok(BinningScheme { kind, s, up_set })
}

/// Scheme selector as written on the command line: `equal`, `single`,
/// or `custom:0,1,4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemeSpec {
    EqualSplit,
    SingleState,
    Custom(Vec<usize>),
}

impl SchemeSpec {
    pub fn build(&self, s: usize) -> Result<BinningScheme> {
        match self {
            SchemeSpec::EqualSplit => make_scheme(SchemeKind::EqualSplit, s, None),
            SchemeSpec::SingleState => make_scheme(SchemeKind::SingleState, s, None),
            SchemeSpec::Custom(up) => make_scheme(SchemeKind::Custom, s, Some(up)),
        }
    }
}

impl FromStr for SchemeSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        match text {
            "equal" => Ok(SchemeSpec::EqualSplit),
            "single" => Ok(SchemeSpec::SingleState),
            _ => {
                let rest = text.strip_prefix("custom:").ok_or_else(|| {
                    Error::InvalidScheme(format!(
                        "unknown scheme {text:?} (expected equal, single, or custom:IDX,IDX,...)"
                    ))
                })?;
                let up = rest
                    .split(',')
                    .map(|tok| {
                        tok.trim().parse::<usize>().map_err(|_| {
                            Error::InvalidScheme(format!("bad up index {tok:?} in {text:?}"))
                        })
                    })
                    .collect::<Result<Vec<usize>>>()?;
                Ok(SchemeSpec::Custom(up))
            }
        }
    }
}

/// Binned 2x2 joint table with its up marginals.
#[derive(Clone, Copy, Debug)]
pub struct BinaryJointTable {
    pub p_uu: f64,
    pub p_ud: f64,
    pub p_du: f64,
    pub p_dd: f64,
    /// Mode-1 up marginal, `p_uu + p_ud`.
    pub p_u1: f64,
    /// Mode-2 up marginal, `p_uu + p_du`.
    pub p_u2: f64,
    pub total_mass: f64,
    pub psi0: f64,
}

/// Sum a joint distribution into the four binned cells.
pub fn bin_distribution(
    dist: &JointPhaseDistribution,
    scheme: &BinningScheme,
) -> Result<BinaryJointTable> {
    if scheme.s() != dist.s() {
        return Err(Error::ResolutionMismatch {
            scheme_s: scheme.s(),
            dist_s: dist.s(),
        });
    }
    let dim = dist.s() + 1;
    let up: Vec<bool> = (0..dim).map(|mu| scheme.is_up(mu)).collect();
    let mut cells = [
        KahanSum::new(),
        KahanSum::new(),
        KahanSum::new(),
        KahanSum::new(),
    ];
    for mu1 in 0..dim {
        for mu2 in 0..dim {
            let idx = match (up[mu1], up[mu2]) {
                (true, true) => 0,
                (true, false) => 1,
                (false, true) => 2,
                (false, false) => 3,
            };
            cells[idx].add(dist.prob(mu1, mu2)?);
        }
    }
    let [p_uu, p_ud, p_du, p_dd] = [
        cells[0].value(),
        cells[1].value(),
        cells[2].value(),
        cells[3].value(),
    ];
    Ok(BinaryJointTable {
        p_uu,
        p_ud,
        p_du,
        p_dd,
        p_u1: p_uu + p_ud,
        p_u2: p_uu + p_du,
        total_mass: p_uu + p_ud + p_du + p_dd,
        psi0: dist.grid().psi0(),
    })
}

/// Probability of an up result on one mode with no information about
/// the other: `|up| / (s+1)` times the retained mass (raw) or alone
/// (renormalized). Independent of every reference phase.
pub fn p_up_marginal(
    state: &CoefficientVector,
    grid: &PhaseGrid,
    scheme: &BinningScheme,
    mode: NormalizationMode,
) -> Result<f64> {
    if scheme.s() != grid.s {
        return Err(Error::ResolutionMismatch {
            scheme_s: scheme.s(),
            dist_s: grid.s,
        });
    }
    let frac = scheme.up_len() as f64 / (grid.s as f64 + 1.0);
    Ok(match mode {
        NormalizationMode::ProjectedRaw => frac * state.projected_mass(grid.s),
        NormalizationMode::Renormalized => frac,
    })
}
