//! Closed-form upper bounds on the extracted singlet fidelity and their
//! certification aids: the corner / (2,1) / Φ⁺ block bounds, the combined
//! five-variable angle form ε_ρ± with its analytic gradient, the gradient-norm
//! bound ι_sup, the two trigonometric majorants, the residual-cube matrix
//! certificate, and the device-dependent comparison bound.
//!
//! The angle form uses s = cos(ã) substitutions so every partial derivative
//! stays bounded on the closed box [0, π/2]⁵.

use serde::{Deserialize, Serialize};

use crate::chsh::StateFamilyParams;
use crate::error::{Error, Result};
use crate::linalg::sym_eigenvalues;
use crate::scalar::Real;

/// Which branch of ε_ρ± to evaluate; the branch sign multiplies the
/// λ2·λ2 + λ3·λ3 contribution of the Φ⁺ block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Branch::Plus => T::one(),
            Branch::Minus => -T::one(),
        }
    }
}

/// Branch selection for drivers: a single branch or the pointwise maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchChoice {
    Plus,
    Minus,
    Both,
}

/// The five reduced variables (ã0, ã1, b̃0, b̃1, θ), each in [0, π/2].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedPoint<T> {
    pub a0t: T,
    pub a1t: T,
    pub b0t: T,
    pub b1t: T,
    pub theta: T,
}

impl<T: Real> ReducedPoint<T> {
    pub fn new(a0t: T, a1t: T, b0t: T, b1t: T, theta: T) -> Result<Self> {
        let x = Self {
            a0t,
            a1t,
            b0t,
            b1t,
            theta,
        };
        for (name, v) in [
            ("a0t", a0t),
            ("a1t", a1t),
            ("b0t", b0t),
            ("b1t", b1t),
            ("theta", theta),
        ] {
            if !(T::zero()..=T::FRAC_PI_2() + T::of(1e-12)).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, pi/2], got {v}"
                )));
            }
        }
        Ok(x)
    }

    pub fn as_array(&self) -> [T; 5] {
        [self.a0t, self.a1t, self.b0t, self.b1t, self.theta]
    }

    pub fn from_array(x: &[T; 5]) -> Self {
        Self {
            a0t: x[0],
            a1t: x[1],
            b0t: x[2],
            b1t: x[3],
            theta: x[4],
        }
    }

    /// Canonical ordering ã0 ≤ ã1, b̃0 ≤ b̃1 (holds for reduced strategies).
    pub fn is_canonical(&self) -> bool {
        self.a0t <= self.a1t && self.b0t <= self.b1t
    }
}

/// The maximizing boundary point: full amplitude damping on both sides.
pub fn x_exc<T: Real>() -> [T; 5] {
    [
        T::zero(),
        T::FRAC_PI_2(),
        T::zero(),
        T::FRAC_PI_2(),
        T::zero(),
    ]
}

/// The excluded hypercube C_ex (edge π/16, x_exc as a vertex), as per-axis
/// [lo, hi] pairs in the (ã0, ã1, b̃0, b̃1, θ) order.
pub fn c_ex_bounds<T: Real>() -> [[T; 2]; 5] {
    let lo_edge = [T::zero(), T::FRAC_PI_2() / T::of(8.0)];
    let hi_edge = [T::FRAC_PI_2() - T::FRAC_PI_2() / T::of(8.0), T::FRAC_PI_2()];
    [lo_edge, hi_edge, lo_edge, hi_edge, lo_edge]
}

// ---------------------------------------------------------------------------
// blockwise bounds
// ---------------------------------------------------------------------------

fn check_unit_disc<T: Real>(a2: T, zeta2: T) -> Result<()> {
    if a2 < T::zero() || zeta2 < T::zero() {
        return Err(Error::InvalidParameter(format!(
            "a2 and zeta2 must be nonnegative, got {a2}, {zeta2}"
        )));
    }
    if a2 * a2 + zeta2 * zeta2 > T::one() + T::of(1e-9) {
        return Err(Error::InvalidParameter(format!(
            "a2^2 + zeta2^2 must not exceed 1, got {}",
            a2 * a2 + zeta2 * zeta2
        )));
    }
    Ok(())
}

/// Corner-mixture bound: ε_C = √((q+(1−q)a₂)² + (1−q)²ζ₂²); the corner
/// fidelity satisfies F_C ≤ ¼(1+ε_C).
pub fn epsilon_corner<T: Real>(q: T, a2: T, zeta2: T) -> Result<T> {
    if !(T::zero()..=T::one()).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "q must lie in [0,1], got {q}"
        )));
    }
    check_unit_disc(a2, zeta2)?;
    let u = q + (T::one() - q) * a2;
    let v = (T::one() - q) * zeta2;
    Ok((u * u + v * v).sqrt())
}

/// (2,1)-block bound: ε_21 = a₂·b₁ + ζ₂·σ_max(M_B¹).
pub fn epsilon_21<T: Real>(a2: T, b1: T, zeta2: T, sigma_max_b1: T) -> Result<T> {
    check_unit_disc(a2, zeta2)?;
    for (name, v) in [("b1", b1), ("sigma_max_b1", sigma_max_b1)] {
        if !(T::zero()..=T::one() + T::of(1e-12)).contains(&v) {
            return Err(Error::InvalidParameter(format!(
                "{name} must lie in [0,1], got {v}"
            )));
        }
    }
    Ok(a2 * b1 + zeta2 * sigma_max_b1)
}

/// Φ⁺-block bound: ε_Φ⁺ = a₁·b₁ + Σ(M_A)ᵀΣ(M_B) with Σ the singular values
/// ordered by absolute value (Mirsky's trace inequality).
pub fn epsilon_phi<T: Real>(a1: T, b1: T, sig_a: (T, T, T), sig_b: (T, T, T)) -> Result<T> {
    for (name, s) in [("A", sig_a), ("B", sig_b)] {
        let tol = T::of(1e-12);
        if s.0.abs() + tol < s.1.abs() || s.1.abs() + tol < s.2.abs() {
            return Err(Error::InvalidParameter(format!(
                "singular values of {name} must be ordered by absolute value"
            )));
        }
    }
    Ok(a1 * b1
        + sig_a.0.abs() * sig_b.0.abs()
        + sig_a.1.abs() * sig_b.1.abs()
        + sig_a.2.abs() * sig_b.2.abs())
}

// ---------------------------------------------------------------------------
// combined angle form
// ---------------------------------------------------------------------------

/// ε_ρ± at a raw point, branch sign passed as ±1. Hot path of the certifier.
///
/// Evaluation order is fixed (ν-term plus the grouped (1−ν)-terms) so that
/// the boundary maximum at `x_exc` evaluates to exactly 1.0.
#[inline]
pub fn epsilon_rho_raw<T: Real>(x: &[T; 5], nu: T, p_c: T, sign: T) -> T {
    let (sa0, ca0) = x[0].sin_cos();
    let (sa1, ca1) = x[1].sin_cos();
    let (sb0, cb0) = x[2].sin_cos();
    let (sb1, cb1) = x[3].sin_cos();
    let (st, ct) = x[4].sin_cos();
    let one = T::one();

    let a_vec = [
        ca0 * ca0 - ca1 * ca1,
        ca0 * ca1 + sa0 * sa1,
        sign * (ca0 * ca1 - sa0 * sa1),
        sign * (-one + ca0 * ca0 + ca1 * ca1),
    ];
    let b_vec = [
        cb0 * cb0 - cb1 * cb1,
        cb0 * cb1 + sb0 * sb1,
        cb0 * cb1 - sb0 * sb1,
        -one + cb0 * cb0 + cb1 * cb1,
    ];
    let dot = a_vec[0] * b_vec[0] + a_vec[1] * b_vec[1] + a_vec[2] * b_vec[2] + a_vec[3] * b_vec[3];
    let cos_half = (x[4] * T::half()).cos();
    let block21 = ct * b_vec[0] + st * b_vec[1];
    let rest = (one - nu) * p_c * cos_half + (one - nu) * (one - p_c) * block21;
    nu * dot + rest
}

/// max(ε_ρ⁺, ε_ρ⁻) at a raw point, sharing the trigonometry of both branches.
#[inline]
pub fn epsilon_rho_max_raw<T: Real>(x: &[T; 5], nu: T, p_c: T) -> T {
    let (sa0, ca0) = x[0].sin_cos();
    let (sa1, ca1) = x[1].sin_cos();
    let (sb0, cb0) = x[2].sin_cos();
    let (sb1, cb1) = x[3].sin_cos();
    let (st, ct) = x[4].sin_cos();
    let one = T::one();

    let a1 = ca0 * ca0 - ca1 * ca1;
    let a2 = ca0 * ca1 + sa0 * sa1;
    let a3 = ca0 * ca1 - sa0 * sa1;
    let a4 = -one + ca0 * ca0 + ca1 * ca1;
    let b1 = cb0 * cb0 - cb1 * cb1;
    let b2 = cb0 * cb1 + sb0 * sb1;
    let b3 = cb0 * cb1 - sb0 * sb1;
    let b4 = -one + cb0 * cb0 + cb1 * cb1;

    let base = a1 * b1 + a2 * b2;
    let pm = a3 * b3 + a4 * b4;
    let dot = base + pm.abs();
    let cos_half = (x[4] * T::half()).cos();
    let block21 = ct * b1 + st * b2;
    let rest = (one - nu) * p_c * cos_half + (one - nu) * (one - p_c) * block21;
    nu * dot + rest
}

/// ε_ρ± in the angle variables; `q` inside the family parameters is ignored
/// and fixed to ½ (the most constraining corner split).
pub fn epsilon_rho<T: Real>(
    x: &ReducedPoint<T>,
    p: &StateFamilyParams<T>,
    branch: Branch,
) -> Result<T> {
    let x = ReducedPoint::new(x.a0t, x.a1t, x.b0t, x.b1t, x.theta)?;
    let p = StateFamilyParams::new(p.nu, p.p_c, p.q)?;
    Ok(epsilon_rho_raw(
        &x.as_array(),
        p.nu,
        p.p_c,
        branch.sign::<T>(),
    ))
}

/// Analytic gradient of ε_ρ± (five partials, same variable order as the
/// point). One-sided derivatives apply on the boundary.
pub fn grad_epsilon_rho<T: Real>(
    x: &ReducedPoint<T>,
    p: &StateFamilyParams<T>,
    branch: Branch,
) -> [T; 5] {
    let sign: T = branch.sign();
    let one = T::one();
    let two = T::two();
    let (nu, p_c) = (p.nu, p.p_c);
    let k = (one - nu) * (one - p_c);
    let m = (one - nu) * p_c;

    let (sa0, ca0) = x.a0t.sin_cos();
    let (sa1, ca1) = x.a1t.sin_cos();
    let (sb0, cb0) = x.b0t.sin_cos();
    let (sb1, cb1) = x.b1t.sin_cos();
    let (st, ct) = x.theta.sin_cos();

    let a_vec = [
        ca0 * ca0 - ca1 * ca1,
        ca0 * ca1 + sa0 * sa1,
        sign * (ca0 * ca1 - sa0 * sa1),
        sign * (-one + ca0 * ca0 + ca1 * ca1),
    ];
    let b_vec = [
        cb0 * cb0 - cb1 * cb1,
        cb0 * cb1 + sb0 * sb1,
        cb0 * cb1 - sb0 * sb1,
        -one + cb0 * cb0 + cb1 * cb1,
    ];

    let sin2 = |s: T, c: T| two * s * c;
    let sin_diff = |sx: T, cx: T, sy: T, cy: T| sx * cy - cx * sy; // sin(x−y)
    let sin_sum = |sx: T, cx: T, sy: T, cy: T| sx * cy + cx * sy; // sin(x+y)

    let s2a0 = sin2(sa0, ca0);
    let s2a1 = sin2(sa1, ca1);
    let s2b0 = sin2(sb0, cb0);
    let s2b1 = sin2(sb1, cb1);
    let s_a_diff = sin_diff(sa0, ca0, sa1, ca1);
    let s_a_sum = sin_sum(sa0, ca0, sa1, ca1);
    let s_b_diff = sin_diff(sb0, cb0, sb1, cb1);
    let s_b_sum = sin_sum(sb0, cb0, sb1, cb1);

    let d_a0 = [-s2a0, -s_a_diff, -sign * s_a_sum, -sign * s2a0];
    let d_a1 = [s2a1, s_a_diff, -sign * s_a_sum, -sign * s2a1];
    let d_b0 = [-s2b0, -s_b_diff, -s_b_sum, -s2b0];
    let d_b1 = [s2b1, s_b_diff, -s_b_sum, -s2b1];

    let dot = |u: &[T; 4], v: &[T; 4]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3];

    [
        nu * dot(&d_a0, &b_vec),
        nu * dot(&d_a1, &b_vec),
        nu * dot(&a_vec, &d_b0) + k * (-ct * s2b0 - st * s_b_diff),
        nu * dot(&a_vec, &d_b1) + k * (ct * s2b1 + st * s_b_diff),
        -m * (x.theta * T::half()).sin() * T::half() + k * (-st * b_vec[0] + ct * b_vec[1]),
    ]
}

/// How to read the last term of the gradient-norm bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradBoundReading {
    /// (1−p_C)(1−ν)² as printed: larger, hence sound and the default.
    Printed,
    /// ((1−p_C)(1−ν))², the reading the per-variable bound suggests.
    Tight,
}

/// One-sided maxima of the five partial derivatives:
/// (3ν, 3ν, 3ν+(1−p_C)(1−ν), 3ν+(1−p_C)(1−ν), (1−p_C)(1−ν)).
pub fn per_variable_grad_bounds<T: Real>(p: &StateFamilyParams<T>) -> [T; 5] {
    let three_nu = T::of(3.0) * p.nu;
    let k = (T::one() - p.p_c) * (T::one() - p.nu);
    [three_nu, three_nu, three_nu + k, three_nu + k, k]
}

/// Gradient-norm bound ι_sup = √(2(3ν)² + 2(3ν+(1−p_C)(1−ν))² + last).
pub fn iota_sup_with<T: Real>(p: &StateFamilyParams<T>, reading: GradBoundReading) -> T {
    let three_nu = T::of(3.0) * p.nu;
    let k = (T::one() - p.p_c) * (T::one() - p.nu);
    let last = match reading {
        GradBoundReading::Printed => (T::one() - p.p_c) * (T::one() - p.nu) * (T::one() - p.nu),
        GradBoundReading::Tight => k * k,
    };
    (T::two() * three_nu * three_nu + T::two() * (three_nu + k) * (three_nu + k) + last).sqrt()
}

/// ι_sup with the printed (conservative) last term.
pub fn iota_sup<T: Real>(p: &StateFamilyParams<T>) -> T {
    iota_sup_with(p, GradBoundReading::Printed)
}

// ---------------------------------------------------------------------------
// trigonometric majorants
// ---------------------------------------------------------------------------

/// cos x ≤ 1 − ((1−cos Ω)/Ω²)·x² for 0 ≤ x ≤ Ω ≤ 2π; tight at x = Ω.
pub fn trig_cos_bound<T: Real>(x: T, omega: T) -> Result<T> {
    if x < T::zero() || x > omega || omega > T::two() * T::PI() {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= x <= Omega <= 2*pi, got x={x}, Omega={omega}"
        )));
    }
    if omega == T::zero() {
        return Ok(T::one());
    }
    Ok(T::one() - ((T::one() - omega.cos()) / (omega * omega)) * x * x)
}

/// cos x · cos y ≤ 1 − (sin²Ω/(2Ω²))·(x²+y²) for 0 ≤ x, y ≤ Ω ≤ π.
pub fn trig_cos_product_bound<T: Real>(x: T, y: T, omega: T) -> Result<T> {
    if x < T::zero() || y < T::zero() || x > omega || y > omega || omega > T::PI() {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= x,y <= Omega <= pi, got x={x}, y={y}, Omega={omega}"
        )));
    }
    if omega == T::zero() {
        return Ok(T::one());
    }
    let s = omega.sin();
    Ok(T::one() - (s * s / (T::two() * omega * omega)) * (x * x + y * y))
}

// ---------------------------------------------------------------------------
// residual-cube certificate
// ---------------------------------------------------------------------------

/// The three majorant constants for the C_ex argument ranges.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrigConstants<T> {
    /// sin²(3π/16)/(2(3π/16)²) ≈ 0.44478
    pub c1: T,
    /// sin²(π/8)/(2(π/8)²) ≈ 0.47483
    pub c2: T,
    /// (1−cos(π/32))/(π/32)² ≈ 0.49958
    pub c3: T,
}

impl<T: Real> TrigConstants<T> {
    pub fn new() -> Self {
        let pi = T::PI();
        let w1 = T::of(3.0) * pi / T::of(16.0);
        let w2 = pi / T::of(8.0);
        let w3 = pi / T::of(32.0);
        TrigConstants {
            c1: w1.sin() * w1.sin() / (T::two() * w1 * w1),
            c2: w2.sin() * w2.sin() / (T::two() * w2 * w2),
            c3: (T::one() - w3.cos()) / (w3 * w3),
        }
    }
}

impl<T: Real> Default for TrigConstants<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Outcome of the analytical argument on C_ex: the 5×5 matrix T in the
/// residual variables r = (μ_a, μ_b, δ_a, δ_b, θ), the largest eigenvalue of
/// its symmetric part, and the verdict λ_max < 0 (which certifies
/// ε_ρ⁺ ≤ 1 + λ_max·|r|² ≤ 1 on the cube; the ε⁻ branch follows from the
/// μ_a → −μ_a mapping).
#[derive(Clone, Copy, Debug)]
pub struct ResidualCertificate<T> {
    pub t: [[T; 5]; 5],
    pub lambda_max: T,
    pub valid: bool,
}

/// Build the residual matrix for (ν, p_C) and eigen-decompose its
/// symmetrization; the quadratic form only sees ½(T+Tᵀ).
pub fn residual_cube_certificate<T: Real>(p: &StateFamilyParams<T>) -> ResidualCertificate<T> {
    let c = TrigConstants::<T>::new();
    let (nu, p_c) = (p.nu, p.p_c);
    let one = T::one();
    let o = T::zero();
    let w = one - (one - nu) * p_c;
    let k = (one - nu) * (one - p_c);
    let c12 = c.c1 + c.c2;
    let c21 = c.c2 - c.c1;
    let t55 = T::half() * (one - nu) * (c12 * (T::two() * p_c - T::two()) - c.c3 * p_c);
    let t = [
        [-nu * c12, nu, nu * c21, o, o],
        [nu, -c12 * w, o, c21 * w, o],
        [nu * c21, o, -nu * c12, nu, o],
        [o, c21 * w, nu, -c12 * w, k],
        [o, o, o, k, t55],
    ];
    let mut sym = [[o; 5]; 5];
    for i in 0..5 {
        for j in 0..5 {
            sym[i][j] = T::half() * (t[i][j] + t[j][i]);
        }
    }
    let lambda_max = sym_eigenvalues(sym)[4];
    ResidualCertificate {
        t,
        lambda_max,
        valid: lambda_max < T::zero(),
    }
}

/// Map an angle point to the residual coordinates (μ_a, μ_b, δ_a, δ_b, θ).
pub fn residual_coords<T: Real>(x: &[T; 5]) -> [T; 5] {
    let h = T::FRAC_PI_2();
    [
        h - (x[1] + x[0]),
        h - (x[3] + x[2]),
        h - (x[1] - x[0]),
        h - (x[3] - x[2]),
        x[4],
    ]
}

// ---------------------------------------------------------------------------
// device-dependent comparison
// ---------------------------------------------------------------------------

/// Fidelity floor in the trusted-measurement setting: F ≥ S/(2√2); nontrivial
/// as soon as S > √2. Informational only.
pub fn comparison_fidelity_bound<T: Real>(s: T) -> Result<T> {
    let max = T::two() * T::SQRT_2();
    if s < -max || s > max {
        return Err(Error::InvalidParameter(format!(
            "CHSH score must lie in [-2*sqrt(2), 2*sqrt(2)], got {s}"
        )));
    }
    Ok(s / max)
}
