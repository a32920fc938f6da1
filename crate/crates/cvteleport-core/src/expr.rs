//! Field operators as sparse linear Bogoliubov expressions.
//!
//! An expression is `δ + Σ α_i a_i + Σ β_i a_i†` over modes of one registry.
//! All elementary optical transformations used in these networks act
//! linearly on this form, so compositions stay exact. The beamsplitter sign
//! convention is fixed to the (sum, difference)/√2 form: port one carries
//! `√t e1 + √(1−t) e2`, port two `√(1−t) e1 − √t e2`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::modes::{ModeId, ModeRegistry};
use crate::{CoreError, C64, ZERO_PRUNE};

/// A field operator in linear-plus-displacement form.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldExpression {
    registry: u64,
    displacement: C64,
    ann: BTreeMap<ModeId, C64>,
    cre: BTreeMap<ModeId, C64>,
}

impl FieldExpression {
    /// The zero operator (registry-tagged).
    pub fn zero(reg: &ModeRegistry) -> Self {
        FieldExpression {
            registry: reg.id(),
            displacement: C64::new(0.0, 0.0),
            ann: BTreeMap::new(),
            cre: BTreeMap::new(),
        }
    }

    /// `a_mode`, the identity expression on one registered mode.
    pub fn identity(reg: &ModeRegistry, mode: ModeId) -> Result<Self, CoreError> {
        reg.check(mode)?;
        let mut e = Self::zero(reg);
        e.ann.insert(mode, C64::new(1.0, 0.0));
        Ok(e)
    }

    /// A pure displacement constant (no operator content).
    pub fn constant(reg: &ModeRegistry, value: C64) -> Self {
        let mut e = Self::zero(reg);
        e.displacement = value;
        e.prune();
        e
    }

    pub fn registry_id(&self) -> u64 {
        self.registry
    }

    pub fn displacement(&self) -> C64 {
        self.displacement
    }

    pub fn set_displacement(&mut self, value: C64) {
        self.displacement = value;
    }

    pub fn ann_coeff(&self, mode: ModeId) -> C64 {
        self.ann.get(&mode).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn cre_coeff(&self, mode: ModeId) -> C64 {
        self.cre.get(&mode).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn ann_terms(&self) -> impl Iterator<Item = (ModeId, C64)> + '_ {
        self.ann.iter().map(|(m, c)| (*m, *c))
    }

    pub fn cre_terms(&self) -> impl Iterator<Item = (ModeId, C64)> + '_ {
        self.cre.iter().map(|(m, c)| (*m, *c))
    }

    /// Modes carrying any nonzero coefficient, annihilation or creation.
    pub fn support(&self) -> Vec<ModeId> {
        let mut modes: Vec<ModeId> = self.ann.keys().copied().collect();
        for m in self.cre.keys() {
            if !modes.contains(m) {
                modes.push(*m);
            }
        }
        modes.sort();
        modes
    }

    /// Number of operator terms (annihilation plus creation coefficients).
    pub fn term_count(&self) -> usize {
        self.ann.len() + self.cre.len()
    }

    /// Hermitian conjugate: swaps the coefficient maps with conjugation.
    pub fn dagger(&self) -> Self {
        let conj_map = |m: &BTreeMap<ModeId, C64>| {
            m.iter().map(|(k, v)| (*k, v.conj())).collect::<BTreeMap<_, _>>()
        };
        FieldExpression {
            registry: self.registry,
            displacement: self.displacement.conj(),
            ann: conj_map(&self.cre),
            cre: conj_map(&self.ann),
        }
    }

    /// `Σ|α_i|² − Σ|β_i|²`; equals 1 for any canonically constructed output.
    pub fn commutator_norm(&self) -> f64 {
        let sum = |m: &BTreeMap<ModeId, C64>| m.values().map(|c| c.norm_sqr()).sum::<f64>();
        sum(&self.ann) - sum(&self.cre)
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let mut out = self.clone();
        out.displacement *= factor;
        for c in out.ann.values_mut() {
            *c *= factor;
        }
        for c in out.cre.values_mut() {
            *c *= factor;
        }
        out.prune();
        out
    }

    /// Phase rotation of one mode, `a_m → e^{iφ} a_m` (and `a_m† → e^{−iφ} a_m†`).
    pub fn rotate_mode(&mut self, mode: ModeId, phase: f64) {
        let f = C64::from_polar(1.0, phase);
        if let Some(c) = self.ann.get_mut(&mode) {
            *c *= f;
        }
        if let Some(c) = self.cre.get_mut(&mode) {
            *c *= f.conj();
        }
    }

    fn add_scaled(&mut self, factor: C64, other: &Self) {
        self.displacement += factor * other.displacement;
        for (m, c) in &other.ann {
            *self.ann.entry(*m).or_insert(C64::new(0.0, 0.0)) += factor * c;
        }
        for (m, c) in &other.cre {
            *self.cre.entry(*m).or_insert(C64::new(0.0, 0.0)) += factor * c;
        }
    }

    fn prune(&mut self) {
        self.ann.retain(|_, c| c.norm() > ZERO_PRUNE);
        self.cre.retain(|_, c| c.norm() > ZERO_PRUNE);
        if self.displacement.norm() <= ZERO_PRUNE {
            self.displacement = C64::new(0.0, 0.0);
        }
    }
}

/// Complex linear combination of expressions sharing a registry.
pub fn linear_combine(terms: &[(C64, &FieldExpression)]) -> Result<FieldExpression, CoreError> {
    let Some(first) = terms.first() else {
        // An empty combination has no registry to tag; disallow.
        return Err(CoreError::MixedRegistries);
    };
    let mut out = FieldExpression {
        registry: first.1.registry,
        displacement: C64::new(0.0, 0.0),
        ann: BTreeMap::new(),
        cre: BTreeMap::new(),
    };
    for (factor, e) in terms {
        if e.registry != out.registry {
            return Err(CoreError::MixedRegistries);
        }
        out.add_scaled(*factor, e);
    }
    out.prune();
    Ok(out)
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Beamsplitter of intensity transmission `t` on two input expressions.
pub fn beamsplitter(
    e1: &FieldExpression,
    e2: &FieldExpression,
    transmission: f64,
) -> Result<(FieldExpression, FieldExpression), CoreError> {
    if !(0.0..=1.0).contains(&transmission) || !transmission.is_finite() {
        return Err(CoreError::ParamRange { name: "transmission", value: transmission });
    }
    let ct = transmission.sqrt();
    let st = (1.0 - transmission).sqrt();
    let out1 = linear_combine(&[(re(ct), e1), (re(st), e2)])?;
    let out2 = linear_combine(&[(re(st), e1), (re(-ct), e2)])?;
    Ok((out1, out2))
}

/// Attenuation by intensity transmission `η` with a fresh vacuum penalty mode.
pub fn loss_channel(
    e: &FieldExpression,
    eta: f64,
    reg: &mut ModeRegistry,
) -> Result<FieldExpression, CoreError> {
    if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
        return Err(CoreError::ParamRange { name: "eta", value: eta });
    }
    let penalty = reg.fresh("loss");
    let vac = FieldExpression::identity(reg, penalty)?;
    linear_combine(&[(re(eta.sqrt()), e), (re((1.0 - eta).sqrt()), &vac)])
}

/// Lossless EPR pair from non-degenerate parametric amplification of two
/// fresh vacuum modes: `b1 = √H v3 + √(H−1) v4†`, `b2 = √H v4 + √(H−1) v3†`.
pub fn two_mode_squeeze(
    m1: ModeId,
    m2: ModeId,
    parametric_gain: f64,
    reg: &ModeRegistry,
) -> Result<(FieldExpression, FieldExpression), CoreError> {
    if parametric_gain < 1.0 || !parametric_gain.is_finite() {
        return Err(CoreError::ParamRange { name: "H", value: parametric_gain });
    }
    let v3 = FieldExpression::identity(reg, m1)?;
    let v4 = FieldExpression::identity(reg, m2)?;
    let c = parametric_gain.sqrt();
    let s = (parametric_gain - 1.0).sqrt();
    let b1 = linear_combine(&[(re(c), &v3), (re(s), &v4.dagger())])?;
    let b2 = linear_combine(&[(re(c), &v4), (re(s), &v3.dagger())])?;
    Ok((b1, b2))
}

/// Degenerate parametric amplifier: `√G e + pump_sign √(G−1) e†`.
pub fn degenerate_pa(
    e: &FieldExpression,
    gain: f64,
    pump_sign: i8,
) -> Result<FieldExpression, CoreError> {
    if gain < 1.0 || !gain.is_finite() {
        return Err(CoreError::ParamRange { name: "G", value: gain });
    }
    let sign = if pump_sign >= 0 { 1.0 } else { -1.0 };
    linear_combine(&[
        (re(gain.sqrt()), e),
        (re(sign * (gain - 1.0).sqrt()), &e.dagger()),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (ModeRegistry, ModeId, ModeId) {
        let mut reg = ModeRegistry::new();
        let a = reg.register("a_h");
        let b = reg.register("b_h");
        (reg, a, b)
    }

    #[test]
    fn identity_is_canonical() {
        let (reg, a, _) = setup();
        let e = FieldExpression::identity(&reg, a).unwrap();
        assert_eq!(e.commutator_norm(), 1.0);
        assert_eq!(e.dagger().cre_coeff(a), C64::new(1.0, 0.0));
    }

    #[test]
    fn identity_rejects_foreign_mode() {
        let (reg, _, _) = setup();
        let mut other = ModeRegistry::new();
        let m = other.register("x");
        assert_eq!(FieldExpression::identity(&reg, m), Err(CoreError::UnknownMode));
    }

    #[test]
    fn dagger_is_involution_and_flips_commutator() {
        let (reg, a, b) = setup();
        let ea = FieldExpression::identity(&reg, a).unwrap();
        let vb = FieldExpression::identity(&reg, b).unwrap().dagger();
        // e = a + 2 b†
        let e = linear_combine(&[(C64::new(1.0, 0.0), &ea), (C64::new(2.0, 0.0), &vb)]).unwrap();
        assert_eq!(e.dagger().dagger(), e);
        assert_eq!(e.dagger().cre_coeff(a), C64::new(1.0, 0.0));
        assert_eq!(e.dagger().ann_coeff(b), C64::new(2.0, 0.0));
        assert!((e.dagger().commutator_norm() + e.commutator_norm()).abs() < 1e-12);
    }

    #[test]
    fn combination_cancels_to_zero() {
        let (reg, a, _) = setup();
        let e = FieldExpression::identity(&reg, a).unwrap();
        let z = linear_combine(&[(C64::new(1.0, 0.0), &e), (C64::new(-1.0, 0.0), &e)]).unwrap();
        assert_eq!(z.term_count(), 0);
        assert_eq!(z.commutator_norm(), 0.0);
    }

    #[test]
    fn mixed_registries_rejected() {
        let (reg, a, _) = setup();
        let mut reg2 = ModeRegistry::new();
        let x = reg2.register("x");
        let e1 = FieldExpression::identity(&reg, a).unwrap();
        let e2 = FieldExpression::identity(&reg2, x).unwrap();
        let one = C64::new(1.0, 0.0);
        assert_eq!(linear_combine(&[(one, &e1), (one, &e2)]), Err(CoreError::MixedRegistries));
    }

    #[test]
    fn balanced_beamsplitter_matches_convention() {
        let (reg, a, b) = setup();
        let ea = FieldExpression::identity(&reg, a).unwrap();
        let eb = FieldExpression::identity(&reg, b).unwrap();
        let (c, d) = beamsplitter(&ea, &eb, 0.5).unwrap();
        let inv = core::f64::consts::FRAC_1_SQRT_2;
        assert!((c.ann_coeff(a).re - inv).abs() < 1e-15);
        assert!((c.ann_coeff(b).re - inv).abs() < 1e-15);
        assert!((d.ann_coeff(a).re - inv).abs() < 1e-15);
        assert!((d.ann_coeff(b).re + inv).abs() < 1e-15);
    }

    #[test]
    fn full_transmission_passes_through() {
        let (reg, a, b) = setup();
        let ea = FieldExpression::identity(&reg, a).unwrap();
        let eb = FieldExpression::identity(&reg, b).unwrap();
        let (o1, o2) = beamsplitter(&ea, &eb, 1.0).unwrap();
        assert_eq!(o1, ea);
        assert_eq!(o2, eb.scaled(C64::new(-1.0, 0.0)));
        assert!(beamsplitter(&ea, &eb, 1.5).is_err());
    }

    #[test]
    fn empty_interferometer_has_unit_visibility_path() {
        // Two balanced beamsplitters recombined in phase return the input on
        // port one.
        let (reg, a, b) = setup();
        let ea = FieldExpression::identity(&reg, a).unwrap();
        let eb = FieldExpression::identity(&reg, b).unwrap();
        let (c, d) = beamsplitter(&ea, &eb, 0.5).unwrap();
        let (out1, out2) = beamsplitter(&c, &d, 0.5).unwrap();
        assert!((out1.ann_coeff(a).re - 1.0).abs() < 1e-12);
        assert!(out1.ann_coeff(b).norm() < 1e-12);
        assert!(out2.ann_coeff(a).norm() < 1e-12);
    }

    #[test]
    fn loss_channel_limits() {
        let (mut reg, a, _) = setup();
        let e = FieldExpression::identity(&reg, a).unwrap();
        let full = loss_channel(&e, 1.0, &mut reg).unwrap();
        assert_eq!(full.ann_coeff(a), C64::new(1.0, 0.0));
        assert_eq!(full.term_count(), 1);

        let none = loss_channel(&e, 0.0, &mut reg).unwrap();
        assert!(none.ann_coeff(a).norm() < 1e-15);
        assert_eq!(none.term_count(), 1);

        for eta in [0.0, 0.3, 0.7, 1.0] {
            let out = loss_channel(&e, eta, &mut reg).unwrap();
            assert!((out.commutator_norm() - 1.0).abs() < 1e-12);
        }
        assert!(loss_channel(&e, -0.1, &mut reg).is_err());
    }

    #[test]
    fn two_mode_squeeze_limits() {
        let mut reg = ModeRegistry::new();
        let v3 = reg.register("v3");
        let v4 = reg.register("v4");
        let (b1, b2) = two_mode_squeeze(v3, v4, 1.0, &reg).unwrap();
        assert_eq!(b1, FieldExpression::identity(&reg, v3).unwrap());
        assert_eq!(b2, FieldExpression::identity(&reg, v4).unwrap());

        // H = 1.125 corresponds to 50% entanglement squeezing.
        let h = 1.125f64;
        let v_ent = (h.sqrt() - (h - 1.0).sqrt()).powi(2);
        assert!((v_ent - 0.5).abs() < 1e-12);
        let (b1, _) = two_mode_squeeze(v3, v4, h, &reg).unwrap();
        assert!((b1.commutator_norm() - 1.0).abs() < 1e-12);
        assert!(two_mode_squeeze(v3, v4, 0.5, &reg).is_err());
    }

    #[test]
    fn degenerate_pa_is_canonical() {
        let (reg, a, _) = setup();
        let e = FieldExpression::identity(&reg, a).unwrap();
        assert_eq!(degenerate_pa(&e, 1.0, 1).unwrap(), e);
        for g in [1.0, 1.5, 4.0, 100.0] {
            let out = degenerate_pa(&e, g, -1).unwrap();
            assert!((out.commutator_norm() - 1.0).abs() < 1e-12);
        }
        assert!(degenerate_pa(&e, 0.9, 1).is_err());
    }

    #[test]
    fn teleported_output_commutator_is_one() {
        // λ a + (λ√H − √(H−1)) v3† + (√H − λ√(H−1)) v4 has commutator norm 1
        // for all λ and H ≥ 1.
        let mut reg = ModeRegistry::new();
        let a = reg.register("a");
        let v3 = reg.register("v3");
        let v4 = reg.register("v4");
        for &h in &[1.0f64, 1.125, 2.0, 10.0] {
            for i in 0..7 {
                let lam = 0.25 * i as f64;
                let ea = FieldExpression::identity(&reg, a).unwrap();
                let e3 = FieldExpression::identity(&reg, v3).unwrap().dagger();
                let e4 = FieldExpression::identity(&reg, v4).unwrap();
                let beta = lam * h.sqrt() - (h - 1.0).sqrt();
                let gamma = h.sqrt() - lam * (h - 1.0).sqrt();
                let out = linear_combine(&[
                    (C64::new(lam, 0.0), &ea),
                    (C64::new(beta, 0.0), &e3),
                    (C64::new(gamma, 0.0), &e4),
                ])
                .unwrap();
                assert!((out.commutator_norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}
