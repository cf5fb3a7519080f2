//! Qubit algebra: extremal channel parametrization, Kraus ↔ affine
//! conversion, channel application in the Bloch picture, and singlet
//! fidelities of two-qubit blocks.
//!
//! Extremal single-qubit CPTP maps are either unitary or rank-2 with Kraus
//! pair
//!
//! ```text
//! K0 = U diag(s0, s1) V†,   K1 = U offdiag(√(1−s1²), √(1−s0²)) V†
//! ```
//!
//! whose affine (Bloch-ball) form has translation `a = R_U (0,0,s0²−s1²)ᵀ`
//! and linear part `M = R_U diag(λ1,λ2,λ3) R_Vᵀ`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{quat_from_rotation, su2_from_quat, CMat2, CMat4, Mat3, Vec3, C};
use crate::scalar::Real;

/// Pauli expansion coefficients of a one-qubit operator's traceless part.
pub type BlochVector<T> = Vec3<T>;

/// Tolerance for the special-orthogonality check on input rotations.
fn rotation_tol<T: Real>() -> T {
    T::of(1e-12)
}

/// Parameters (s0, s1, R_U, R_V) of an extremal rank-2 qubit channel;
/// s0 = s1 = 1 gives the unitary with rotation R_U R_Vᵀ.
#[derive(Clone, Copy, Debug)]
pub struct ExtremalChannelParams<T> {
    pub s0: T,
    pub s1: T,
    pub r_u: Mat3<T>,
    pub r_v: Mat3<T>,
}

impl<T: Real> ExtremalChannelParams<T> {
    pub fn new(s0: T, s1: T, r_u: Mat3<T>, r_v: Mat3<T>) -> Result<Self> {
        if !(T::zero()..=T::one()).contains(&s0) || !(T::zero()..=T::one()).contains(&s1) {
            return Err(Error::InvalidParameter(format!(
                "singular parameters must lie in [0,1], got s0={s0}, s1={s1}"
            )));
        }
        for (name, r) in [("R_U", &r_u), ("R_V", &r_v)] {
            if !r.is_special_orthogonal(rotation_tol::<T>()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} is not special orthogonal within 1e-12"
                )));
            }
        }
        Ok(Self { s0, s1, r_u, r_v })
    }

    /// The identity channel.
    pub fn identity() -> Self {
        Self {
            s0: T::one(),
            s1: T::one(),
            r_u: Mat3::identity(),
            r_v: Mat3::identity(),
        }
    }

    /// Full amplitude damping: every input is sent to |0⟩⟨0|.
    pub fn amplitude_damping() -> Self {
        Self {
            s0: T::one(),
            s1: T::zero(),
            r_u: Mat3::identity(),
            r_v: Mat3::identity(),
        }
    }

    /// Unitary channel with Bloch rotation `r`.
    pub fn unitary(r: Mat3<T>) -> Result<Self> {
        Self::new(T::one(), T::one(), r, Mat3::identity())
    }
}

/// Kraus pair of a rank ≤ 2 channel.
#[derive(Clone, Copy, Debug)]
pub struct KrausPair<T> {
    pub k0: CMat2<T>,
    pub k1: CMat2<T>,
}

impl<T: Real> KrausPair<T> {
    /// Max-abs-entry of K0†K0 + K1†K1 − I.
    pub fn completeness_defect(&self) -> T {
        let sum = self
            .k0
            .adjoint()
            .mul(&self.k0)
            .add(&self.k1.adjoint().mul(&self.k1));
        sum.max_abs_diff(&CMat2::identity())
    }

    /// Apply the channel to a density matrix.
    pub fn apply(&self, rho: &CMat2<T>) -> CMat2<T> {
        self.k0
            .mul(rho)
            .mul(&self.k0.adjoint())
            .add(&self.k1.mul(rho).mul(&self.k1.adjoint()))
    }
}

/// A qubit channel as an affine map of the Bloch ball: v ↦ a + M v.
#[derive(Clone, Copy, Debug)]
pub struct AffineChannel<T> {
    pub a: Vec3<T>,
    pub m: Mat3<T>,
}

/// Dense 4×4 two-qubit operator in the computational basis |00⟩,|01⟩,|10⟩,|11⟩.
#[derive(Clone, Copy, Debug)]
pub struct TwoQubitOperator<T>(pub CMat4<T>);

impl<T: Real> TwoQubitOperator<T> {
    /// |Φ⁺⟩⟨Φ⁺| with Φ⁺ = (|00⟩+|11⟩)/√2.
    pub fn phi_plus() -> Self {
        let h = T::half();
        let mut m = CMat4::zero();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            m.0[i][j] = C::new(h, T::zero());
        }
        TwoQubitOperator(m)
    }

    pub fn kron(a: &CMat2<T>, b: &CMat2<T>) -> Self {
        TwoQubitOperator(CMat4::kron(a, b))
    }

    pub fn hermiticity_defect(&self) -> T {
        self.0.hermiticity_defect()
    }

    /// Hermitian within 1e−12, unit trace, eigenvalues ≥ −1e−10.
    pub fn state_defect(&self) -> T {
        let herm = self.hermiticity_defect();
        let tr = (self.0.trace().re - T::one())
            .abs()
            .max(self.0.trace().im.abs());
        let min_ev = self.0.hermitian_eigenvalues()[0];
        let neg = (-min_ev).max(T::zero());
        herm.max(tr).max(neg)
    }

    pub fn is_state(&self) -> bool {
        self.hermiticity_defect() <= T::of(1e-12)
            && (self.0.trace().re - T::one()).abs() <= T::of(1e-12)
            && self.0.hermitian_eigenvalues()[0] >= -T::of(1e-10)
    }
}

/// Kraus operators of an extremal channel, Bloch rotations lifted to SU(2).
/// The two SU(2) preimages ±U give the same channel, so either lift works.
pub fn kraus_from_params<T: Real>(p: &ExtremalChannelParams<T>) -> Result<KrausPair<T>> {
    // revalidate: p may have been constructed literally
    let p = ExtremalChannelParams::new(p.s0, p.s1, p.r_u, p.r_v)?;
    let u = su2_from_quat(quat_from_rotation(&p.r_u));
    let v = su2_from_quat(quat_from_rotation(&p.r_v));
    let vd = v.adjoint();
    let d0 = CMat2::real_diag(p.s0, p.s1);
    let mut d1 = CMat2::zero();
    d1.0[0][1] = Complex::new((T::one() - p.s1 * p.s1).sqrt(), T::zero());
    d1.0[1][0] = Complex::new((T::one() - p.s0 * p.s0).sqrt(), T::zero());
    Ok(KrausPair {
        k0: u.mul(&d0).mul(&vd),
        k1: u.mul(&d1).mul(&vd),
    })
}

/// Affine form recovered from Kraus operators alone (basis-free): the
/// translation is the Bloch vector of Λ[I/2], and column k of M is the Bloch
/// vector of Λ[½(I+σ_k)] minus the translation.
pub fn affine_from_kraus<T: Real>(k: &KrausPair<T>) -> Result<AffineChannel<T>> {
    if k.completeness_defect() > T::of(1e-8) {
        return Err(Error::InvalidChannel(format!(
            "Kraus pair is not trace preserving (defect {})",
            k.completeness_defect()
        )));
    }
    let half_id = CMat2::identity().scale_re(T::half());
    let a = k.apply(&half_id).bloch();
    let mut m = Mat3::zero();
    for (col, sigma) in [CMat2::pauli_x(), CMat2::pauli_y(), CMat2::pauli_z()]
        .iter()
        .enumerate()
    {
        let input = CMat2::identity().add(sigma).scale_re(T::half());
        let out = k.apply(&input).bloch();
        for row in 0..3 {
            m.0[row][col] = out.0[row] - a.0[row];
        }
    }
    Ok(AffineChannel { a, m })
}

/// Closed-form affine representation of an extremal channel.
pub fn affine_from_params<T: Real>(p: &ExtremalChannelParams<T>) -> AffineChannel<T> {
    let (l1, l2, l3) = singular_values_unchecked(p.s0, p.s1);
    let a = p
        .r_u
        .mul_vec(&Vec3::new(T::zero(), T::zero(), p.s0 * p.s0 - p.s1 * p.s1));
    let m = p.r_u.mul(&Mat3::diag(l1, l2, l3)).mul(&p.r_v.transpose());
    AffineChannel { a, m }
}

fn singular_values_unchecked<T: Real>(s0: T, s1: T) -> (T, T, T) {
    let root = ((T::one() - s0 * s0) * (T::one() - s1 * s1)).sqrt();
    // summing the squares first keeps the exchange symmetry bit-exact
    (
        s0 * s1 + root,
        s0 * s1 - root,
        (s0 * s0 + s1 * s1) - T::one(),
    )
}

/// Diagonal entries (λ1, λ2, λ3) of the channel's linear part, ordered
/// |λ1| ≥ |λ2| ≥ |λ3| with λ1 ≥ 0; λ2 and λ3 share a sign (λ3 = λ1·λ2).
pub fn channel_singular_values<T: Real>(s0: T, s1: T) -> Result<(T, T, T)> {
    if !(T::zero()..=T::one()).contains(&s0) || !(T::zero()..=T::one()).contains(&s1) {
        return Err(Error::InvalidParameter(format!(
            "singular parameters must lie in [0,1], got s0={s0}, s1={s1}"
        )));
    }
    Ok(singular_values_unchecked(s0, s1))
}

/// v ↦ a + M v.
pub fn apply_affine<T: Real>(c: &AffineChannel<T>, v: &BlochVector<T>) -> BlochVector<T> {
    c.a.add(&c.m.mul_vec(v))
}

/// ⟨Φ⁺| ρ_a ⊗ ρ_b |Φ⁺⟩ for product Bloch states: ¼(1 + aᵀ J b), J = diag(1,−1,1).
pub fn product_singlet_fidelity<T: Real>(a: &BlochVector<T>, b: &BlochVector<T>) -> T {
    let j_dot = a.0[0] * b.0[0] - a.0[1] * b.0[1] + a.0[2] * b.0[2];
    T::of(0.25) * (T::one() + j_dot)
}

/// ⟨Φ⁺| (Λ_A ⊗ Λ_B)[ρ] |Φ⁺⟩ by summing the four Kraus-pair conjugations.
pub fn extracted_block_fidelity<T: Real>(
    ka: &KrausPair<T>,
    kb: &KrausPair<T>,
    rho: &TwoQubitOperator<T>,
) -> Result<T> {
    if !rho.is_state() {
        return Err(Error::InvalidState(format!(
            "block operator is not a state (defect {})",
            rho.state_defect()
        )));
    }
    let r = T::FRAC_1_SQRT_2();
    let phi = [
        C::new(r, T::zero()),
        C::new(T::zero(), T::zero()),
        C::new(T::zero(), T::zero()),
        C::new(r, T::zero()),
    ];
    let mut total = T::zero();
    for a in [&ka.k0, &ka.k1] {
        for b in [&kb.k0, &kb.k1] {
            // w = (A ⊗ B)† |Φ⁺⟩, term = w† ρ w
            let op = CMat4::kron(a, b).adjoint();
            let w = op.mul_vec(&phi);
            let rw = rho.0.mul_vec(&w);
            let mut term = C::new(T::zero(), T::zero());
            for k in 0..4 {
                term = term + w[k].conj() * rw[k];
            }
            total += term.re;
        }
    }
    Ok(total)
}
