//! Tunable constants of the recursion.
//!
//! Two profiles are provided. `Full` uses the constants at full strength;
//! at desk scale its `L` exceeds every ground set and
//! `1/psi` exceeds every terminal set, so the hit-and-miss families
//! degenerate to all pairs and the pivot-detection loop never runs. `Desk`
//! keeps the structure but scales the constants down to logarithmic size so
//! that the halving and family machinery is actually exercised. Its
//! decompositions are too fine at that scale for the pivot-detection loop to
//! be exact, so `Full` is the default.

use serde::{Deserialize, Serialize};

use crate::ratio::Ratio;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Profile {
    Full,
    Desk,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub profile: Profile,
    /// `q = q_mult * ceil(log2 n)^2`, the expander decomposition slack.
    pub q_mult: u64,
    /// Clusters up to this many vertices are certified by cut enumeration.
    pub exhaustive_limit: usize,
    /// Power iterations of the spectral sweep.
    pub sweep_iterations: usize,
    /// Certify sweep-accepted clusters by flows up to this many vertices.
    pub flow_certify_limit: usize,
    /// RemoveLeafStep skips family members that miss the pivot when one is
    /// known; the remaining pairs are unaffected.
    pub pivot: bool,
    /// Reuse isolating-cuts results within one recursion instance.
    pub memoize: bool,
    /// Desk profile multipliers.
    pub desk_cut_psi: u64,
    pub desk_cut_l: u64,
    pub desk_detect_psi: u64,
    pub desk_detect_l: u64,
    pub desk_detect_halving: u64,
}

impl Default for Params {
    fn default() -> Params {
        Params::full()
    }
}

/// `max(1, ceil(log2 x))`.
pub fn lg(x: u128) -> u64 {
    if x <= 2 {
        1
    } else {
        (128 - (x - 1).leading_zeros()) as u64
    }
}

impl Params {
    pub fn full() -> Params {
        Params {
            profile: Profile::Full,
            ..Params::desk()
        }
    }

    pub fn desk() -> Params {
        Params {
            profile: Profile::Desk,
            q_mult: 8,
            exhaustive_limit: 16,
            sweep_iterations: 200,
            flow_certify_limit: 300,
            pivot: true,
            memoize: true,
            desk_cut_psi: 2,
            desk_cut_l: 4,
            desk_detect_psi: 2,
            desk_detect_l: 4,
            desk_detect_halving: 4,
        }
    }

    pub fn q(&self, n: usize) -> u64 {
        let l = lg(n as u128);
        self.q_mult * l * l
    }

    /// Outer loop count of CutThreshold and Decomp.
    pub fn outer_iterations(&self, n: usize) -> usize {
        let l = lg(n as u128) as usize;
        l * l
    }

    /// Inner loop count of CutThreshold and Decomp.
    pub fn inner_iterations(&self, n: usize) -> usize {
        lg(n as u128) as usize
    }

    /// `psi` of CutThreshold and Decomp.
    pub fn cut_psi(&self, n: usize) -> Ratio {
        let l = lg(n as u128) as u128;
        let den = match self.profile {
            Profile::Full => self.q(n) as u128 * 20 * l,
            Profile::Desk => self.desk_cut_psi as u128 * l,
        };
        Ratio::new(1, den).expect("positive denominator")
    }

    /// `L` of CutThreshold and Decomp, clamped to `n`.
    pub fn cut_l(&self, n: usize, w: u64) -> usize {
        let l = match self.profile {
            Profile::Full => {
                let lnw = lg(n as u128 * w.max(1) as u128) as u128;
                let psi = self.cut_psi(n);
                (1000 * lnw * lnw).saturating_mul(psi.denom()) / psi.numer()
            }
            Profile::Desk => self.desk_cut_l as u128 * lg(n as u128) as u128,
        };
        l.clamp(1, n.max(1) as u128) as usize
    }

    /// `psi` of DetectLargeCC.
    pub fn detect_psi(&self, n: usize) -> Ratio {
        let l = lg(n as u128) as u128;
        let den = match self.profile {
            Profile::Full => self.q(n) as u128 * 100 * l,
            Profile::Desk => self.desk_detect_psi as u128 * l,
        };
        Ratio::new(1, den).expect("positive denominator")
    }

    /// `L` of DetectLargeCC, clamped to `n`.
    pub fn detect_l(&self, n: usize) -> usize {
        let l = match self.profile {
            Profile::Full => {
                let psi = self.detect_psi(n);
                (100 * lg(n as u128) as u128).saturating_mul(psi.denom()) / psi.numer()
            }
            Profile::Desk => self.desk_detect_l as u128 * lg(n as u128) as u128,
        };
        l.clamp(1, n.max(1) as u128) as usize
    }

    /// Fraction `f` such that DetectLargeCC halves when `|A'| < f |A|`.
    pub fn detect_halving_fraction(&self, n: usize) -> Ratio {
        let l = lg(n as u128) as u128;
        let psi = self.detect_psi(n);
        let extra = match self.profile {
            Profile::Full => 100 * l,
            Profile::Desk => self.desk_detect_halving as u128,
        };
        Ratio::new(psi.numer(), psi.denom() * extra).expect("positive denominator")
    }
}
