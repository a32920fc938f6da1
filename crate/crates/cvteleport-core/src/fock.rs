//! Exact expectation values on sparse multimode Fock superpositions.
//!
//! States are superpositions over occupation-number tuples, keyed only on
//! modes with nonzero occupation. Expressions act symbolically with the
//! standard ladder factors √n and √(n+1), so no truncation is involved
//! anywhere on this path.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::expr::FieldExpression;
use crate::modes::{ModeId, ModeRegistry};
use crate::{CoreError, C64};

const NORM_TOL: f64 = 1e-12;

/// Sparse occupation tuple; only modes with occupation > 0 are stored,
/// sorted by mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Occupation(Vec<(ModeId, u32)>);

impl Occupation {
    pub fn vacuum() -> Self {
        Occupation(Vec::new())
    }

    pub fn from_pairs(mut pairs: Vec<(ModeId, u32)>) -> Self {
        pairs.retain(|&(_, n)| n > 0);
        pairs.sort();
        Occupation(pairs)
    }

    pub fn get(&self, mode: ModeId) -> u32 {
        self.0
            .binary_search_by(|(m, _)| m.cmp(&mode))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn pairs(&self) -> &[(ModeId, u32)] {
        &self.0
    }

    fn with(&self, mode: ModeId, n: u32) -> Self {
        let mut pairs = self.0.clone();
        match pairs.binary_search_by(|(m, _)| m.cmp(&mode)) {
            Ok(i) => {
                if n == 0 {
                    pairs.remove(i);
                } else {
                    pairs[i].1 = n;
                }
            }
            Err(i) => {
                if n > 0 {
                    pairs.insert(i, (mode, n));
                }
            }
        }
        Occupation(pairs)
    }
}

/// Sparse complex superposition over occupation tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    registry: u64,
    amplitudes: BTreeMap<Occupation, C64>,
}

impl FockState {
    pub fn vacuum(reg: &ModeRegistry) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(Occupation::vacuum(), C64::new(1.0, 0.0));
        FockState { registry: reg.id(), amplitudes }
    }

    /// Builds a superposition from explicit kets; amplitudes are taken as-is.
    pub fn from_kets(reg: &ModeRegistry, kets: &[(&[(ModeId, u32)], C64)]) -> Self {
        let mut amplitudes = BTreeMap::new();
        for (pairs, amp) in kets {
            let occ = Occupation::from_pairs(pairs.to_vec());
            *amplitudes.entry(occ).or_insert(C64::new(0.0, 0.0)) += amp;
        }
        amplitudes.retain(|_, a| a.norm_sqr() > 0.0);
        FockState { registry: reg.id(), amplitudes }
    }

    pub fn registry_id(&self) -> u64 {
        self.registry
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        let mut out = self.clone();
        if n > 0.0 {
            for a in out.amplitudes.values_mut() {
                *a /= n;
            }
        }
        out
    }

    pub fn ket_count(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitude(&self, occ: &Occupation) -> C64 {
        self.amplitudes.get(occ).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn kets(&self) -> impl Iterator<Item = (&Occupation, C64)> + '_ {
        self.amplitudes.iter().map(|(o, a)| (o, *a))
    }

    /// Mean occupation of one mode read directly from the amplitudes.
    pub fn mean_occupation(&self, mode: ModeId) -> f64 {
        self.amplitudes
            .iter()
            .map(|(occ, amp)| occ.get(mode) as f64 * amp.norm_sqr())
            .sum()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        // Iterate the smaller map.
        let (small, large) = if self.amplitudes.len() <= other.amplitudes.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = C64::new(0.0, 0.0);
        for (occ, amp) in &small.amplitudes {
            if let Some(b) = large.amplitudes.get(occ) {
                if core::ptr::eq(small, self) {
                    acc += amp.conj() * b;
                } else {
                    acc += b.conj() * amp;
                }
            }
        }
        acc
    }

    pub fn check_normalized(&self) -> Result<(), CoreError> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(CoreError::UnnormalizedState { norm_sq: n });
        }
        Ok(())
    }
}

/// Applies `e = δ + Σ α_i a_i + Σ β_i a_i†` to a state. The result is
/// generally unnormalized.
pub fn apply(e: &FieldExpression, s: &FockState) -> FockState {
    let mut out: BTreeMap<Occupation, C64> = BTreeMap::new();
    let mut add = |occ: Occupation, amp: C64| {
        *out.entry(occ).or_insert(C64::new(0.0, 0.0)) += amp;
    };
    let delta = e.displacement();
    for (occ, amp) in &s.amplitudes {
        if delta.norm_sqr() > 0.0 {
            add(occ.clone(), delta * amp);
        }
        for (mode, alpha) in e.ann_terms() {
            let n = occ.get(mode);
            if n > 0 {
                add(occ.with(mode, n - 1), alpha * amp * (n as f64).sqrt());
            }
        }
        for (mode, beta) in e.cre_terms() {
            let n = occ.get(mode);
            add(occ.with(mode, n + 1), beta * amp * ((n + 1) as f64).sqrt());
        }
    }
    out.retain(|_, a| a.norm_sqr() > 0.0);
    FockState { registry: s.registry, amplitudes: out }
}

/// `⟨s| e† e |s⟩`, the photon counting expectation for the detector mode `e`.
pub fn expect_number(e: &FieldExpression, s: &FockState) -> Result<f64, CoreError> {
    s.check_normalized()?;
    Ok(apply(e, s).norm_sqr())
}

/// `⟨s| e1† e1 e2† e2 |s⟩`, the coincidence expectation. Exact operator
/// ordering is kept: the result is `⟨e1 s | e1 e2† e2 s⟩`.
pub fn expect_coincidence(
    e1: &FieldExpression,
    e2: &FieldExpression,
    s: &FockState,
) -> Result<f64, CoreError> {
    s.check_normalized()?;
    let left = apply(e1, s);
    let right = apply(e1, &apply(&e2.dagger(), &apply(e2, s)));
    Ok(left.inner(&right).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{beamsplitter, linear_combine};

    fn one_photon(reg: &ModeRegistry, m: ModeId) -> FockState {
        FockState::from_kets(reg, &[(&[(m, 1)], C64::new(1.0, 0.0))])
    }

    #[test]
    fn ladder_actions() {
        let mut reg = ModeRegistry::new();
        let m = reg.register("a");
        let a = FieldExpression::identity(&reg, m).unwrap();
        let s1 = one_photon(&reg, m);

        let lowered = apply(&a, &s1);
        assert!((lowered.amplitude(&Occupation::vacuum()).re - 1.0).abs() < 1e-15);

        let raised = apply(&a.dagger(), &FockState::vacuum(&reg));
        let occ1 = Occupation::from_pairs(alloc::vec![(m, 1)]);
        assert!((raised.amplitude(&occ1).re - 1.0).abs() < 1e-15);

        // a† on |1⟩ carries the √2 ladder factor.
        let raised2 = apply(&a.dagger(), &s1);
        let occ2 = Occupation::from_pairs(alloc::vec![(m, 2)]);
        assert!((raised2.amplitude(&occ2).re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn vacuum_expectations() {
        let mut reg = ModeRegistry::new();
        let m = reg.register("a");
        let a = FieldExpression::identity(&reg, m).unwrap();
        let vac = FockState::vacuum(&reg);
        assert_eq!(expect_number(&a, &vac).unwrap(), 0.0);

        // Pure displacement on vacuum gives |δ|².
        let d = FieldExpression::constant(&reg, C64::new(0.6, 0.8));
        assert!((expect_number(&d, &vac).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_state_rejected() {
        let mut reg = ModeRegistry::new();
        let m = reg.register("a");
        let a = FieldExpression::identity(&reg, m).unwrap();
        let bad = FockState::from_kets(&reg, &[(&[(m, 1)], C64::new(0.5, 0.0))]);
        assert!(matches!(
            expect_number(&a, &bad),
            Err(CoreError::UnnormalizedState { .. })
        ));
    }

    #[test]
    fn beamsplit_superposition_action() {
        // c_h = (a_h + b_h)/√2 applied to x|1,0⟩ leaves (x/√2)|0,0⟩.
        let mut reg = ModeRegistry::new();
        let ah = reg.register("a_h");
        let bh = reg.register("b_h");
        let ea = FieldExpression::identity(&reg, ah).unwrap();
        let eb = FieldExpression::identity(&reg, bh).unwrap();
        let (c, _) = beamsplitter(&ea, &eb, 0.5).unwrap();
        let x = C64::new(0.8, 0.0);
        let y = C64::new(0.0, 0.6);
        let av = reg.register("a_v");
        let s = FockState::from_kets(&reg, &[(&[(ah, 1)], x), (&[(av, 1)], y)]);
        let applied = apply(&c, &s);
        let vac_amp = applied.amplitude(&Occupation::vacuum());
        assert!((vac_amp - x / 2f64.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn number_squared_on_fock_state() {
        // ⟨2| a†a a†a |2⟩ = 4.
        let mut reg = ModeRegistry::new();
        let m = reg.register("a");
        let a = FieldExpression::identity(&reg, m).unwrap();
        let s2 = FockState::from_kets(&reg, &[(&[(m, 2)], C64::new(1.0, 0.0))]);
        assert!((expect_coincidence(&a, &a, &s2).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(
            expect_coincidence(&a, &a, &FockState::vacuum(&reg)).unwrap(),
            0.0
        );
    }

    #[test]
    fn mean_occupation_matches_expect_number() {
        let mut reg = ModeRegistry::new();
        let m = reg.register("a");
        let n = reg.register("b");
        let a = FieldExpression::identity(&reg, m).unwrap();
        let s = FockState::from_kets(
            &reg,
            &[
                (&[(m, 2)], C64::new(0.6, 0.0)),
                (&[(m, 1), (n, 1)], C64::new(0.0, 0.8)),
            ],
        );
        let direct = s.mean_occupation(m);
        let via_engine = expect_number(&a, &s).unwrap();
        assert!((direct - via_engine).abs() < 1e-12);
        assert!((direct - (0.36 * 2.0 + 0.64)).abs() < 1e-12);
    }

    #[test]
    fn sparsity_bound_holds() {
        // Applying an expression with k terms to m kets yields ≤ (k+1)·m kets.
        let mut reg = ModeRegistry::new();
        let m1 = reg.register("a");
        let m2 = reg.register("b");
        let e1 = FieldExpression::identity(&reg, m1).unwrap();
        let e2 = FieldExpression::identity(&reg, m2).unwrap().dagger();
        let mut e = linear_combine(&[(C64::new(0.3, 0.1), &e1), (C64::new(0.2, -0.4), &e2)])
            .unwrap();
        e.set_displacement(C64::new(0.5, 0.0));
        let s = FockState::from_kets(
            &reg,
            &[
                (&[(m1, 1)], C64::new(0.7, 0.0)),
                (&[(m2, 3)], C64::new(0.0, 0.7)),
            ],
        );
        let k = e.term_count();
        let out = apply(&e, &s);
        assert!(out.ket_count() <= (k + 1) * s.ket_count());
    }

    #[test]
    fn global_phase_invariance() {
        let mut reg = ModeRegistry::new();
        let m = reg.register("a");
        let a = FieldExpression::identity(&reg, m).unwrap();
        let s = one_photon(&reg, m);
        let phased = FockState::from_kets(&reg, &[(&[(m, 1)], C64::from_polar(1.0, 1.234))]);
        let n1 = expect_number(&a, &s).unwrap();
        let n2 = expect_number(&a, &phased).unwrap();
        assert!((n1 - n2).abs() < 1e-15);
    }
}
