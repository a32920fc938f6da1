//! Independent validation path: the same networks, decomposed into
//! elementary Gaussian unitaries and run as a truncated dense state-vector
//! simulation. Nothing here shares numerics with the symbolic engine beyond
//! the network expressions themselves.
//!
//! Supported network class: canonical, mutually commuting outputs whose
//! creation content lives on a single shared mode. Such maps factor as
//! passive stage → one two-mode squeezer → passive stage (a one-squeezer
//! Bloch–Messiah normal form), which covers the teleporter interferometer
//! with lossless EPR beams; propagation losses on other arms are ordinary
//! beamsplitters and need no special handling.
//!
//! Truncation is per mode. Two-mode ops are applied exactly on their
//! conserved-quantity blocks, extended past the cutoff by a margin; weight
//! that lands outside the cutoff is discarded and accumulated as `leakage`
//! (a genuine norm deficit, not a unitarity error).

#[cfg(not(feature = "std"))]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use crate::expr::FieldExpression;
use crate::interferometer::{build_arm, CountsMethod, InputKind, MzConfig, VisibilityReport};
use crate::linalg::{expm, Mat};
use crate::modes::{ModeId, ModeRegistry};
use crate::{CoreError, C64};

/// Leakage above this makes an oracle result unreliable.
pub const LEAKAGE_LIMIT: f64 = 1e-4;

const MARGIN: usize = 16;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Elementary Gaussian unitaries over dense mode indices.
///
/// Heisenberg conventions (a_i measured after the op):
/// beamsplitter: a_i → cosθ a_i + sinθ a_j, a_j → cosθ a_j − sinθ a_i;
/// squeezer: a_i → cosh r a_i + sinh r a_j†; phase: a_i → e^{iφ} a_i;
/// displacement: a_i → a_i + δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementaryOp {
    Beamsplitter { m1: usize, m2: usize, theta: f64 },
    TwoModeSqueezer { m1: usize, m2: usize, r: f64 },
    Phase { mode: usize, phi: f64 },
    Displacement { mode: usize, delta: C64 },
}

impl ElementaryOp {
    /// Intensity transmission of a beamsplitter op.
    pub fn transmission(&self) -> Option<f64> {
        match self {
            ElementaryOp::Beamsplitter { theta, .. } => Some(theta.cos().powi(2)),
            _ => None,
        }
    }
}

/// Truncated dense multimode state. Amplitudes are stored over the full
/// product basis with per-mode occupation ≤ n_max.
#[derive(Debug, Clone)]
pub struct DenseState {
    n_modes: usize,
    n_max: usize,
    dims: usize,
    amps: Vec<C64>,
    leakage: f64,
}

impl DenseState {
    pub fn vacuum(n_modes: usize, n_max: usize) -> Self {
        let dims = n_max + 1;
        let len = dims.pow(n_modes as u32);
        let mut amps = vec![C64::new(0.0, 0.0); len];
        amps[0] = re(1.0);
        DenseState { n_modes, n_max, dims, amps, leakage: 0.0 }
    }

    /// Vacuum with a single photon placed in one mode.
    pub fn single_photon(n_modes: usize, n_max: usize, mode: usize) -> Self {
        let mut s = Self::vacuum(n_modes, n_max);
        s.amps[0] = re(0.0);
        let idx = s.stride(mode);
        s.amps[idx] = re(1.0);
        s
    }

    fn stride(&self, mode: usize) -> usize {
        self.dims.pow((self.n_modes - 1 - mode) as u32)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Accumulated truncation norm deficit.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn mean_occupation(&self, mode: usize) -> f64 {
        let stride = self.stride(mode);
        self.amps
            .iter()
            .enumerate()
            .map(|(idx, a)| ((idx / stride) % self.dims) as f64 * a.norm_sqr())
            .sum()
    }

    fn occ(&self, idx: usize, mode: usize) -> usize {
        (idx / self.stride(mode)) % self.dims
    }

    pub fn apply(&mut self, op: &ElementaryOp) {
        match *op {
            ElementaryOp::Phase { mode, phi } => {
                let stride = self.stride(mode);
                for (idx, a) in self.amps.iter_mut().enumerate() {
                    let n = (idx / stride) % self.dims;
                    *a *= C64::from_polar(1.0, phi * n as f64);
                }
            }
            ElementaryOp::Beamsplitter { m1, m2, theta } => self.apply_bs(m1, m2, theta),
            ElementaryOp::TwoModeSqueezer { m1, m2, r } => self.apply_tms(m1, m2, r),
            ElementaryOp::Displacement { mode, delta } => self.apply_disp(mode, delta),
        }
    }

    /// Beamsplitter: exact unitary on each total-photon block of the mode
    /// pair; entries pushed past the per-mode cutoff leak out.
    fn apply_bs(&mut self, m1: usize, m2: usize, theta: f64) {
        if theta.abs() < 1e-15 {
            return;
        }
        let s1 = self.stride(m1);
        let s2 = self.stride(m2);
        // Block unitary per total photon number s; basis index k = n_{m1}.
        let blocks: Vec<Mat> = (0..=2 * self.n_max)
            .map(|s| {
                let dim = s + 1;
                let mut g = Mat::zeros(dim);
                for k in 0..s {
                    // θ(a1†a2 − a2†a1) on |k, s−k⟩.
                    let t = theta * (((k + 1) * (s - k)) as f64).sqrt();
                    g[(k + 1, k)] = re(t);
                    g[(k, k + 1)] = re(-t);
                }
                expm(&g)
            })
            .collect();
        let mut scratch: Vec<C64> = vec![C64::new(0.0, 0.0); 2 * self.n_max + 1];
        for anchor in 0..self.amps.len() {
            if self.occ(anchor, m1) != 0 || self.occ(anchor, m2) != 0 {
                continue;
            }
            for (s, u) in blocks.iter().enumerate().skip(1) {
                let k_lo = s.saturating_sub(self.n_max);
                let k_hi = s.min(self.n_max);
                if k_lo > k_hi {
                    continue;
                }
                for k in 0..=s {
                    scratch[k] = if (k_lo..=k_hi).contains(&k) {
                        self.amps[anchor + k * s1 + (s - k) * s2]
                    } else {
                        C64::new(0.0, 0.0)
                    };
                }
                for k in 0..=s {
                    let mut acc = C64::new(0.0, 0.0);
                    for l in 0..=s {
                        acc += u[(k, l)] * scratch[l];
                    }
                    if (k_lo..=k_hi).contains(&k) {
                        self.amps[anchor + k * s1 + (s - k) * s2] = acc;
                    } else {
                        self.leakage += acc.norm_sqr();
                    }
                }
            }
        }
    }

    /// Two-mode squeezer: exact on each photon-number-difference ladder,
    /// extended past the cutoff by a margin before projecting back.
    fn apply_tms(&mut self, m1: usize, m2: usize, r: f64) {
        if r.abs() < 1e-15 {
            return;
        }
        let s1 = self.stride(m1);
        let s2 = self.stride(m2);
        // Ladder unitary per difference d = |n1 − n2|, basis t with
        // (n1, n2) = (d+t, t) up to relabeling.
        let blocks: Vec<Mat> = (0..=self.n_max)
            .map(|d| {
                let dim = self.n_max - d + 1 + MARGIN;
                let mut g = Mat::zeros(dim);
                for t in 0..dim - 1 {
                    // r(a1†a2† − a1a2) on |d+t, t⟩.
                    let v = r * (((d + t + 1) * (t + 1)) as f64).sqrt();
                    g[(t + 1, t)] = re(v);
                    g[(t, t + 1)] = re(-v);
                }
                expm(&g)
            })
            .collect();
        for anchor in 0..self.amps.len() {
            let n1 = self.occ(anchor, m1);
            let n2 = self.occ(anchor, m2);
            if n1.min(n2) != 0 {
                continue;
            }
            let d = n1.max(n2);
            let u = &blocks[d];
            let in_cap = self.n_max - d + 1;
            let dim = u.dim;
            let mut vec_in = vec![C64::new(0.0, 0.0); dim];
            for (t, v) in vec_in.iter_mut().enumerate().take(in_cap) {
                *v = self.amps[anchor + t * (s1 + s2)];
            }
            for t in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                for l in 0..dim {
                    acc += u[(t, l)] * vec_in[l];
                }
                if t < in_cap {
                    self.amps[anchor + t * (s1 + s2)] = acc;
                } else {
                    self.leakage += acc.norm_sqr();
                }
            }
        }
    }

    fn apply_disp(&mut self, mode: usize, delta: C64) {
        if delta.norm_sqr() == 0.0 {
            return;
        }
        let stride = self.stride(mode);
        let dim = self.n_max + 1 + MARGIN;
        let mut g = Mat::zeros(dim);
        for n in 0..dim - 1 {
            let root = ((n + 1) as f64).sqrt();
            g[(n + 1, n)] = delta * root;
            g[(n, n + 1)] = -delta.conj() * root;
        }
        let u = expm(&g);
        for anchor in 0..self.amps.len() {
            if self.occ(anchor, mode) != 0 {
                continue;
            }
            let mut vec_in = vec![C64::new(0.0, 0.0); dim];
            for (n, v) in vec_in.iter_mut().enumerate().take(self.n_max + 1) {
                *v = self.amps[anchor + n * stride];
            }
            for n in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                for l in 0..dim {
                    acc += u[(n, l)] * vec_in[l];
                }
                if n <= self.n_max {
                    self.amps[anchor + n * stride] = acc;
                } else {
                    self.leakage += acc.norm_sqr();
                }
            }
        }
    }
}

/// Applies an op sequence to a state.
pub fn simulate(ops: &[ElementaryOp], mut input: DenseState) -> DenseState {
    for op in ops {
        input.apply(op);
    }
    input
}

/// An op sequence realizing a set of network outputs, with the dense mode
/// index carrying each output.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub ops: Vec<ElementaryOp>,
    pub out_slots: Vec<usize>,
    /// Registry modes backing each dense index.
    pub mode_map: Vec<ModeId>,
}

struct Coeffs {
    ann: Vec<C64>,
    cre: Vec<C64>,
    delta: C64,
}

fn coeffs_of(e: &FieldExpression, mode_map: &[ModeId]) -> Coeffs {
    let pos = |m: ModeId| mode_map.iter().position(|&x| x == m).expect("mode in map");
    let mut ann = vec![C64::new(0.0, 0.0); mode_map.len()];
    let mut cre = vec![C64::new(0.0, 0.0); mode_map.len()];
    for (m, c) in e.ann_terms() {
        ann[pos(m)] = c;
    }
    for (m, c) in e.cre_terms() {
        cre[pos(m)] = c;
    }
    Coeffs { ann, cre, delta: e.displacement() }
}

/// Heisenberg push of coefficient vectors through one op (used to verify a
/// decomposition independently of the dense simulator).
fn push_heisenberg(c: &mut Coeffs, op: &ElementaryOp) {
    match *op {
        ElementaryOp::Beamsplitter { m1, m2, theta } => {
            let (cs, sn) = (theta.cos(), theta.sin());
            let (u1, u2) = (c.ann[m1], c.ann[m2]);
            c.ann[m1] = cs * u1 - sn * u2;
            c.ann[m2] = sn * u1 + cs * u2;
            let (v1, v2) = (c.cre[m1], c.cre[m2]);
            c.cre[m1] = cs * v1 - sn * v2;
            c.cre[m2] = sn * v1 + cs * v2;
        }
        ElementaryOp::TwoModeSqueezer { m1, m2, r } => {
            let (ch, sh) = (r.cosh(), r.sinh());
            let (u1, u2) = (c.ann[m1], c.ann[m2]);
            let (v1, v2) = (c.cre[m1], c.cre[m2]);
            c.ann[m1] = ch * u1 + sh * v2;
            c.ann[m2] = ch * u2 + sh * v1;
            c.cre[m1] = ch * v1 + sh * u2;
            c.cre[m2] = ch * v2 + sh * u1;
        }
        ElementaryOp::Phase { mode, phi } => {
            let p = C64::from_polar(1.0, phi);
            c.ann[mode] *= p;
            c.cre[mode] *= p.conj();
        }
        ElementaryOp::Displacement { mode, delta } => {
            c.delta += c.ann[mode] * delta + c.cre[mode] * delta.conj();
        }
    }
}

/// Factor a 2×2 unitary into phases and one beamsplitter, emitted in
/// application order so the composed Heisenberg matrices reproduce it.
fn factor_2x2(u: [[C64; 2]; 2], a: usize, b: usize, ops: &mut Vec<ElementaryOp>) {
    let push_phase = |ops: &mut Vec<ElementaryOp>, mode: usize, phi: f64| {
        if phi.abs() > 1e-14 {
            ops.push(ElementaryOp::Phase { mode, phi });
        }
    };
    let s = u[0][1].norm();
    if s <= 1e-13 {
        push_phase(ops, a, u[0][0].arg());
        push_phase(ops, b, u[1][1].arg());
        return;
    }
    let c = u[0][0].norm();
    if c <= 1e-13 {
        ops.push(ElementaryOp::Beamsplitter { m1: a, m2: b, theta: core::f64::consts::FRAC_PI_2 });
        push_phase(ops, a, u[0][1].arg());
        push_phase(ops, b, (-u[1][0]).arg());
        return;
    }
    let theta = s.atan2(c);
    let p1 = u[0][0].arg();
    let q2 = u[0][1].arg() - p1;
    let p2 = u[1][0].arg() + core::f64::consts::PI;
    // Emission order [P_r, BS, P_l] composes to P_l·R(θ)·P_r.
    push_phase(ops, b, q2);
    ops.push(ElementaryOp::Beamsplitter { m1: a, m2: b, theta });
    push_phase(ops, a, p1);
    push_phase(ops, b, p2);
}

/// Reck-style factorization of an N×N passive unitary into phases and
/// beamsplitters; the emitted sequence's Heisenberg composition equals `u`.
fn passive_circuit(u: &Mat, ops: &mut Vec<ElementaryOp>) -> Result<(), CoreError> {
    let n = u.dim;
    let id_defect = {
        let g = u.matmul(&u.adjoint());
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - re(want)).norm());
            }
        }
        worst
    };
    if id_defect > 1e-8 {
        return Err(CoreError::NonCanonicalNetwork);
    }
    let mut m = u.clone();
    // Givens eliminations G_L···G_1·U = D; collected in application order.
    let mut givens: Vec<(usize, [[C64; 2]; 2])> = Vec::new();
    for col in 0..n {
        for row in (col + 1..n).rev() {
            let x = m[(row - 1, col)];
            let y = m[(row, col)];
            if y.norm() <= 1e-14 {
                continue;
            }
            let nrm = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let g = [
                [x.conj() / nrm, y.conj() / nrm],
                [-y / nrm, x / nrm],
            ];
            for j in 0..n {
                let a = m[(row - 1, j)];
                let b = m[(row, j)];
                m[(row - 1, j)] = g[0][0] * a + g[0][1] * b;
                m[(row, j)] = g[1][0] * a + g[1][1] * b;
            }
            givens.push((row - 1, [[g[0][0], g[0][1]], [g[1][0], g[1][1]]]));
        }
    }
    // Residual diagonal phases first (rightmost factor of U).
    for i in 0..n {
        let phi = m[(i, i)].arg();
        if phi.abs() > 1e-14 {
            ops.push(ElementaryOp::Phase { mode: i, phi });
        }
    }
    // Then the adjoints, last-eliminated first: U = G_1†···G_L†·D.
    for &(top, g) in givens.iter().rev() {
        let gd = [[g[0][0].conj(), g[1][0].conj()], [g[0][1].conj(), g[1][1].conj()]];
        factor_2x2(gd, top, top + 1, ops);
    }
    Ok(())
}

/// Completes orthonormal rows to a full unitary by Gram–Schmidt over the
/// standard basis.
fn complete_unitary(rows: &[Vec<C64>], n: usize) -> Result<Mat, CoreError> {
    let mut basis: Vec<Vec<C64>> = rows.to_vec();
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[i] = re(1.0);
        for _ in 0..2 {
            for b in &basis {
                let overlap: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vk, bk) in v.iter_mut().zip(b) {
                    *vk -= overlap * bk;
                }
            }
        }
        let nrm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-6 {
            for x in v.iter_mut() {
                *x /= nrm;
            }
            basis.push(v);
        }
    }
    if basis.len() != n {
        return Err(CoreError::NonCanonicalNetwork);
    }
    let mut m = Mat::zeros(n);
    for (i, row) in basis.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = *x;
        }
    }
    Ok(m)
}

/// Decomposes network outputs into an elementary-op sequence whose
/// Heisenberg action reproduces them, verified coefficient-wise to 1e-10.
///
/// Requirements: outputs are canonical, mutually commuting, and their
/// creation content is confined to a single shared mode (no annihilation
/// coefficient on that mode).
pub fn decompose(
    outputs: &[FieldExpression],
    reg: &ModeRegistry,
) -> Result<Decomposition, CoreError> {
    if outputs.is_empty() {
        return Err(CoreError::UnsupportedNetwork);
    }
    // Active modes: union of supports, in registry order.
    let mut mode_map: Vec<ModeId> = Vec::new();
    for m in reg.modes() {
        if outputs.iter().any(|e| {
            e.ann_coeff(m).norm() > crate::ZERO_PRUNE || e.cre_coeff(m).norm() > crate::ZERO_PRUNE
        }) {
            mode_map.push(m);
        }
    }
    let n = mode_map.len();
    let k = outputs.len();
    if k > n {
        return Err(CoreError::UnsupportedNetwork);
    }
    let coeffs: Vec<Coeffs> = outputs.iter().map(|e| coeffs_of(e, &mode_map)).collect();

    // Canonicality and mutual commutation.
    for (i, ci) in coeffs.iter().enumerate() {
        for (j, cj) in coeffs.iter().enumerate() {
            let mut comm = C64::new(0.0, 0.0); // [e_i, e_j†]
            let mut anom = C64::new(0.0, 0.0); // [e_i, e_j]
            for m in 0..n {
                comm += ci.ann[m] * cj.ann[m].conj() - ci.cre[m] * cj.cre[m].conj();
                anom += ci.ann[m] * cj.cre[m] - ci.cre[m] * cj.ann[m];
            }
            let want = if i == j { 1.0 } else { 0.0 };
            if (comm - re(want)).norm() > 1e-10 || anom.norm() > 1e-10 {
                return Err(CoreError::NonCanonicalNetwork);
            }
        }
    }

    // Creation support must sit on one shared mode.
    let mut cre_modes: Vec<usize> = Vec::new();
    for m in 0..n {
        if coeffs.iter().any(|c| c.cre[m].norm() > 1e-10) {
            cre_modes.push(m);
        }
    }
    if cre_modes.len() > 1 {
        return Err(CoreError::UnsupportedNetwork);
    }

    let mut ops: Vec<ElementaryOp> = Vec::new();
    let out_slots: Vec<usize>;
    if cre_modes.is_empty() {
        // Pure passive network: rows are the annihilation coefficients.
        let rows: Vec<Vec<C64>> = coeffs.iter().map(|c| c.ann.clone()).collect();
        let u = complete_unitary(&rows, n)?;
        passive_circuit(&u, &mut ops)?;
        out_slots = (0..k).collect();
    } else {
        let s_idx = cre_modes[0];
        if coeffs.iter().any(|c| c.ann[s_idx].norm() > 1e-10) {
            return Err(CoreError::UnsupportedNetwork);
        }
        let beta: Vec<C64> = coeffs.iter().map(|c| c.cre[s_idx]).collect();
        let sinh_r = beta.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
        let cosh_r = (1.0 + sinh_r * sinh_r).sqrt();
        let r = (sinh_r + cosh_r).ln();
        // K×K unitary V with first column β/sinh r, so f = V†·outputs has
        // all creation content in f_1.
        let vcol: Vec<C64> = beta.iter().map(|b| b / sinh_r).collect();
        let vrows: Vec<Vec<C64>> = vec![vcol.iter().map(|x| x.conj()).collect()];
        let v_full = complete_unitary(&vrows, k)?; // rows of V†
        // f_j annihilation vectors; w_1 = f_1/cosh r.
        let mut w: Vec<Vec<C64>> = Vec::with_capacity(k);
        for j in 0..k {
            let mut fj = vec![C64::new(0.0, 0.0); n];
            for (i, ci) in coeffs.iter().enumerate() {
                let vji = v_full[(j, i)]; // (V†)_{ji}
                for m in 0..n {
                    fj[m] += vji * ci.ann[m];
                }
            }
            if j == 0 {
                for x in fj.iter_mut() {
                    *x /= cosh_r;
                }
            }
            w.push(fj);
        }
        // Output slots: first K modes other than the squeezed one.
        let slots: Vec<usize> = (0..n).filter(|&m| m != s_idx).take(k).collect();
        // Passive stage W: slot_j row = w_j, squeezed mode fixed.
        let mut rows: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]; n];
        let mut assigned = vec![false; n];
        for (j, &slot) in slots.iter().enumerate() {
            rows[slot] = w[j].clone();
            assigned[slot] = true;
        }
        rows[s_idx][s_idx] = re(1.0);
        assigned[s_idx] = true;
        // Complete remaining rows.
        let fixed: Vec<Vec<C64>> = (0..n).filter(|&i| assigned[i]).map(|i| rows[i].clone()).collect();
        let completed = complete_unitary(&fixed, n)?;
        let mut next_extra = fixed.len();
        let mut w_mat = Mat::zeros(n);
        for i in 0..n {
            if assigned[i] {
                for j in 0..n {
                    w_mat[(i, j)] = rows[i][j];
                }
            } else {
                for j in 0..n {
                    w_mat[(i, j)] = completed[(next_extra, j)];
                }
                next_extra += 1;
            }
        }
        passive_circuit(&w_mat, &mut ops)?;
        ops.push(ElementaryOp::TwoModeSqueezer { m1: slots[0], m2: s_idx, r });
        // Final passive stage: V on the slot modes (e = V·f).
        let mut v_embed = Mat::identity(n);
        for (i, &si) in slots.iter().enumerate() {
            for (j, &sj) in slots.iter().enumerate() {
                // V = (V†)†.
                v_embed[(si, sj)] = v_full[(j, i)].conj();
            }
        }
        passive_circuit(&v_embed, &mut ops)?;
        out_slots = slots;
    }

    // Verify by pushing identity operators through the sequence.
    for (idx, target) in coeffs.iter().enumerate() {
        let mut c = Coeffs {
            ann: vec![C64::new(0.0, 0.0); n],
            cre: vec![C64::new(0.0, 0.0); n],
            delta: C64::new(0.0, 0.0),
        };
        c.ann[out_slots[idx]] = re(1.0);
        for op in ops.iter().rev() {
            push_heisenberg(&mut c, op);
        }
        for m in 0..n {
            if (c.ann[m] - target.ann[m]).norm() > 1e-10
                || (c.cre[m] - target.cre[m]).norm() > 1e-10
            {
                return Err(CoreError::NonCanonicalNetwork);
            }
        }
        if (c.delta - target.delta).norm() > 1e-10 {
            return Err(CoreError::NonCanonicalNetwork);
        }
    }

    Ok(Decomposition { ops, out_slots, mode_map })
}

/// Oracle visibility for an interferometer configuration: decomposes the
/// per-polarization network, simulates the two polarization components
/// separately (counts are additive), and reports with accumulated leakage.
pub fn oracle_visibility(cfg: &MzConfig, n_max: usize) -> Result<VisibilityReport, CoreError> {
    cfg.validate()?;
    let mut reg = ModeRegistry::new();
    let a = reg.register("a");
    let input = FieldExpression::identity(&reg, a)?;
    let arm = build_arm(&input, a, cfg, &mut reg)?;
    let dec = decompose(&[arm.out_a.clone(), arm.out_b.clone()], &reg)?;
    let n = dec.mode_map.len();
    let a_slot = dec
        .mode_map
        .iter()
        .position(|&m| m == a)
        .ok_or(CoreError::UnsupportedNetwork)?;

    // Per-polarization inputs: the second component carries the rest of the
    // photon statistics (vacuum unless the input is two-component coherent).
    let inputs: [Option<C64>; 2] = match cfg.input_kind {
        // Counts are input-superposition independent: photon ⊕ vacuum.
        InputKind::SinglePhotonSuperposition { .. } => [None, Some(C64::new(0.0, 0.0))],
        InputKind::Coherent { alpha_h, alpha_v } => [Some(alpha_h), Some(alpha_v)],
        InputKind::NbarAbstract => {
            [Some(re(cfg.input_nbar.sqrt())), Some(C64::new(0.0, 0.0))]
        }
    };

    let mut count_a = 0.0;
    let mut count_b = 0.0;
    let mut leakage = 0.0;
    for prep in inputs {
        let state = match prep {
            None => DenseState::single_photon(n, n_max, a_slot),
            Some(alpha) => {
                let mut s = DenseState::vacuum(n, n_max);
                if alpha.norm_sqr() > 0.0 {
                    s.apply(&ElementaryOp::Displacement { mode: a_slot, delta: alpha });
                }
                s
            }
        };
        let out = simulate(&dec.ops, state);
        count_a += out.mean_occupation(dec.out_slots[0]);
        count_b += out.mean_occupation(dec.out_slots[1]);
        leakage += out.leakage();
    }
    let mut report = VisibilityReport::from_counts(count_a, count_b, CountsMethod::Oracle);
    report.leakage = Some(leakage);
    Ok(report)
}
