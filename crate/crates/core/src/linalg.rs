//! Small fixed-size linear algebra: 3-vectors and 3×3 real matrices for the
//! Bloch picture, 2×2 and 4×4 complex matrices for one- and two-qubit
//! operators, and a Jacobi eigenvalue solver for the tiny symmetric problems
//! (PSD checks, the 5×5 residual matrix).

use num_complex::Complex;

use crate::scalar::Real;

pub type C<T> = Complex<T>;

// ---------------------------------------------------------------------------
// real 3-vectors / 3x3 matrices
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3<T>(pub [T; 3]);

impl<T: Real> Vec3<T> {
    pub fn zero() -> Self {
        Vec3([T::zero(); 3])
    }

    pub fn new(x: T, y: T, z: T) -> Self {
        Vec3([x, y, z])
    }

    pub fn x_hat() -> Self {
        Vec3([T::one(), T::zero(), T::zero()])
    }

    pub fn y_hat() -> Self {
        Vec3([T::zero(), T::one(), T::zero()])
    }

    pub fn z_hat() -> Self {
        Vec3([T::zero(), T::zero(), T::one()])
    }

    /// ĥ₊ = (x̂ + ẑ)/√2, the Bloch vector of H₊.
    pub fn h_plus_hat() -> Self {
        let r = T::FRAC_1_SQRT_2();
        Vec3([r, T::zero(), r])
    }

    pub fn dot(&self, o: &Self) -> T {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn add(&self, o: &Self) -> Self {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }

    pub fn sub(&self, o: &Self) -> Self {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }

    pub fn scale(&self, s: T) -> Self {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    pub fn neg(&self) -> Self {
        self.scale(-T::one())
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        let mut m = T::zero();
        for k in 0..3 {
            m = m.max((self.0[k] - o.0[k]).abs());
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3<T>(pub [[T; 3]; 3]);

impl<T: Real> Mat3<T> {
    pub fn zero() -> Self {
        Mat3([[T::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for k in 0..3 {
            m.0[k][k] = T::one();
        }
        m
    }

    pub fn diag(d0: T, d1: T, d2: T) -> Self {
        let mut m = Self::zero();
        m.0[0][0] = d0;
        m.0[1][1] = d1;
        m.0[2][2] = d2;
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = T::zero();
                for k in 0..3 {
                    s += self.0[i][k] * o.0[k][j];
                }
                r.0[i][j] = s;
            }
        }
        r
    }

    pub fn mul_vec(&self, v: &Vec3<T>) -> Vec3<T> {
        let mut r = Vec3::zero();
        for i in 0..3 {
            r.0[i] = self.0[i][0] * v.0[0] + self.0[i][1] * v.0[1] + self.0[i][2] * v.0[2];
        }
        r
    }

    pub fn det(&self) -> T {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        let mut m = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.0[i][j] - o.0[i][j]).abs());
            }
        }
        m
    }

    /// RᵀR = I and det R = 1, both within `tol`.
    pub fn is_special_orthogonal(&self, tol: T) -> bool {
        let gram = self.transpose().mul(self);
        gram.max_abs_diff(&Self::identity()) <= tol && (self.det() - T::one()).abs() <= tol
    }

    /// Rodrigues rotation about `axis` (normalized internally) by `angle`.
    pub fn rotation_axis_angle(axis: Vec3<T>, angle: T) -> Self {
        let n = axis.norm();
        let (x, y, z) = (axis.0[0] / n, axis.0[1] / n, axis.0[2] / n);
        let (s, c) = angle.sin_cos();
        let t = T::one() - c;
        Mat3([
            [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
            [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
            [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
        ])
    }
}

// ---------------------------------------------------------------------------
// unit quaternions <-> rotations <-> SU(2)
// ---------------------------------------------------------------------------

/// Rotation matrix of the unit quaternion `(w, x, y, z)`.
pub fn rotation_from_quat<T: Real>(q: [T; 4]) -> Mat3<T> {
    let [w, x, y, z] = q;
    let two = T::two();
    Mat3([
        [
            T::one() - two * (y * y + z * z),
            two * (x * y - w * z),
            two * (x * z + w * y),
        ],
        [
            two * (x * y + w * z),
            T::one() - two * (x * x + z * z),
            two * (y * z - w * x),
        ],
        [
            two * (x * z - w * y),
            two * (y * z + w * x),
            T::one() - two * (x * x + y * y),
        ],
    ])
}

/// Quaternion of a rotation matrix (Shepperd's branch selection, stable for
/// angles near π). Sign of the result is fixed by the largest component.
pub fn quat_from_rotation<T: Real>(r: &Mat3<T>) -> [T; 4] {
    let m = &r.0;
    let quarter = T::of(0.25);
    let tr = m[0][0] + m[1][1] + m[2][2];
    let (w, x, y, z);
    if tr > T::zero() {
        let s = (tr + T::one()).sqrt() * T::two();
        w = quarter * s;
        x = (m[2][1] - m[1][2]) / s;
        y = (m[0][2] - m[2][0]) / s;
        z = (m[1][0] - m[0][1]) / s;
    } else if m[0][0] >= m[1][1] && m[0][0] >= m[2][2] {
        let s = (T::one() + m[0][0] - m[1][1] - m[2][2]).sqrt() * T::two();
        w = (m[2][1] - m[1][2]) / s;
        x = quarter * s;
        y = (m[0][1] + m[1][0]) / s;
        z = (m[0][2] + m[2][0]) / s;
    } else if m[1][1] >= m[2][2] {
        let s = (T::one() + m[1][1] - m[0][0] - m[2][2]).sqrt() * T::two();
        w = (m[0][2] - m[2][0]) / s;
        x = (m[0][1] + m[1][0]) / s;
        y = quarter * s;
        z = (m[1][2] + m[2][1]) / s;
    } else {
        let s = (T::one() + m[2][2] - m[0][0] - m[1][1]).sqrt() * T::two();
        w = (m[1][0] - m[0][1]) / s;
        x = (m[0][2] + m[2][0]) / s;
        y = (m[1][2] + m[2][1]) / s;
        z = quarter * s;
    }
    let n = (w * w + x * x + y * y + z * z).sqrt();
    [w / n, x / n, y / n, z / n]
}

/// SU(2) element of the unit quaternion: `w·I − i(x·X + y·Y + z·Z)`.
pub fn su2_from_quat<T: Real>(q: [T; 4]) -> CMat2<T> {
    let [w, x, y, z] = q;
    CMat2([
        [C::new(w, -z), C::new(-y, -x)],
        [C::new(y, -x), C::new(w, z)],
    ])
}

// ---------------------------------------------------------------------------
// complex 2x2 / 4x4
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat2<T>(pub [[C<T>; 2]; 2]);

impl<T: Real> CMat2<T> {
    pub fn zero() -> Self {
        CMat2([[C::new(T::zero(), T::zero()); 2]; 2])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        m.0[0][0] = C::new(T::one(), T::zero());
        m.0[1][1] = C::new(T::one(), T::zero());
        m
    }

    pub fn pauli_x() -> Self {
        let mut m = Self::zero();
        m.0[0][1] = C::new(T::one(), T::zero());
        m.0[1][0] = C::new(T::one(), T::zero());
        m
    }

    pub fn pauli_y() -> Self {
        let mut m = Self::zero();
        m.0[0][1] = C::new(T::zero(), -T::one());
        m.0[1][0] = C::new(T::zero(), T::one());
        m
    }

    pub fn pauli_z() -> Self {
        let mut m = Self::zero();
        m.0[0][0] = C::new(T::one(), T::zero());
        m.0[1][1] = C::new(-T::one(), T::zero());
        m
    }

    /// H₊ = (Z + X)/√2.
    pub fn h_plus() -> Self {
        Self::pauli_z()
            .add(&Self::pauli_x())
            .scale_re(T::FRAC_1_SQRT_2())
    }

    /// H₋ = (Z − X)/√2.
    pub fn h_minus() -> Self {
        Self::pauli_z()
            .sub(&Self::pauli_x())
            .scale_re(T::FRAC_1_SQRT_2())
    }

    pub fn real_diag(d0: T, d1: T) -> Self {
        let mut m = Self::zero();
        m.0[0][0] = C::new(d0, T::zero());
        m.0[1][1] = C::new(d1, T::zero());
        m
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.0[i][j] = self.0[i][j] + o.0[i][j];
            }
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.0[i][j] = self.0[i][j] - o.0[i][j];
            }
        }
        r
    }

    pub fn scale_re(&self, s: T) -> Self {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.0[i][j] = r.0[i][j].scale(s);
            }
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = C::new(T::zero(), T::zero());
                for k in 0..2 {
                    s = s + self.0[i][k] * o.0[k][j];
                }
                r.0[i][j] = s;
            }
        }
        r
    }

    pub fn adjoint(&self) -> Self {
        let mut r = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.0[i][j] = self.0[j][i].conj();
            }
        }
        r
    }

    pub fn trace(&self) -> C<T> {
        self.0[0][0] + self.0[1][1]
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        let mut m = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.0[i][j] - o.0[i][j]).norm());
            }
        }
        m
    }

    /// Bloch components (⟨X⟩, ⟨Y⟩, ⟨Z⟩) of a density matrix.
    pub fn bloch(&self) -> Vec3<T> {
        let m = &self.0;
        // tr(ρY) = i(ρ01 − ρ10) = Im ρ10 − Im ρ01 for Hermitian ρ
        Vec3([
            (m[0][1] + m[1][0]).re,
            m[1][0].im - m[0][1].im,
            (m[0][0] - m[1][1]).re,
        ])
    }

    /// ½(I + x·X + y·Y + z·Z).
    pub fn density_from_bloch(v: &Vec3<T>) -> Self {
        let h = T::half();
        let mut m = Self::zero();
        m.0[0][0] = C::new(h * (T::one() + v.0[2]), T::zero());
        m.0[1][1] = C::new(h * (T::one() - v.0[2]), T::zero());
        m.0[0][1] = C::new(h * v.0[0], -h * v.0[1]);
        m.0[1][0] = C::new(h * v.0[0], h * v.0[1]);
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat4<T>(pub [[C<T>; 4]; 4]);

impl<T: Real> CMat4<T> {
    pub fn zero() -> Self {
        CMat4([[C::new(T::zero(), T::zero()); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for k in 0..4 {
            m.0[k][k] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn kron(a: &CMat2<T>, b: &CMat2<T>) -> Self {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                    }
                }
            }
        }
        m
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                r.0[i][j] = self.0[i][j] + o.0[i][j];
            }
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                r.0[i][j] = self.0[i][j] - o.0[i][j];
            }
        }
        r
    }

    pub fn scale_re(&self, s: T) -> Self {
        let mut r = *self;
        for i in 0..4 {
            for j in 0..4 {
                r.0[i][j] = r.0[i][j].scale(s);
            }
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut s = C::new(T::zero(), T::zero());
                for k in 0..4 {
                    s = s + self.0[i][k] * o.0[k][j];
                }
                r.0[i][j] = s;
            }
        }
        r
    }

    pub fn adjoint(&self) -> Self {
        let mut r = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                r.0[i][j] = self.0[j][i].conj();
            }
        }
        r
    }

    pub fn trace(&self) -> C<T> {
        let mut s = C::new(T::zero(), T::zero());
        for k in 0..4 {
            s = s + self.0[k][k];
        }
        s
    }

    pub fn mul_vec(&self, v: &[C<T>; 4]) -> [C<T>; 4] {
        let mut r = [C::new(T::zero(), T::zero()); 4];
        for i in 0..4 {
            for k in 0..4 {
                r[i] = r[i] + self.0[i][k] * v[k];
            }
        }
        r
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        let mut m = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((self.0[i][j] - o.0[i][j]).norm());
            }
        }
        m
    }

    pub fn hermiticity_defect(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    /// Eigenvalues of a Hermitian matrix via the real symmetric embedding
    /// [[Re, −Im], [Im, Re]]; each eigenvalue comes back doubled, so the
    /// sorted even-index entries are returned.
    pub fn hermitian_eigenvalues(&self) -> [T; 4] {
        let mut e = [[T::zero(); 8]; 8];
        for i in 0..4 {
            for j in 0..4 {
                e[i][j] = self.0[i][j].re;
                e[i + 4][j + 4] = self.0[i][j].re;
                e[i][j + 4] = -self.0[i][j].im;
                e[i + 4][j] = self.0[i][j].im;
            }
        }
        let ev = sym_eigenvalues(e);
        [ev[0], ev[2], ev[4], ev[6]]
    }
}

// ---------------------------------------------------------------------------
// Jacobi eigenvalues for small symmetric matrices
// ---------------------------------------------------------------------------

/// Eigenvalues of a symmetric N×N matrix, ascending. Cyclic Jacobi sweeps;
/// plenty for N ≤ 8.
pub fn sym_eigenvalues<T: Real, const N: usize>(mut a: [[T; N]; N]) -> [T; N] {
    let mut scale = T::zero();
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            debug_assert!(
                (v - a[j][i]).abs() <= T::of(1e-12) * (T::one() + v.abs()),
                "matrix must be symmetric"
            );
            scale = scale.max(v.abs());
        }
    }
    if scale == T::zero() {
        return [T::zero(); N];
    }
    let tol = T::epsilon() * scale;
    for _sweep in 0..64 {
        let mut off = T::zero();
        for i in 0..N {
            for j in (i + 1)..N {
                off = off.max(a[i][j].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                if a[p][q].abs() <= tol * T::of(1e-3) {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::two() * a[p][q]);
                let t = {
                    let s = if theta >= T::zero() {
                        T::one()
                    } else {
                        -T::one()
                    };
                    s / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev = [T::zero(); N];
    for k in 0..N {
        ev[k] = a[k][k];
    }
    ev.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    type M3 = Mat3<f64>;

    #[test]
    fn rotation_round_trip() {
        let r = M3::rotation_axis_angle(Vec3::new(1.0, 2.0, -0.5), 1.234);
        assert!(r.is_special_orthogonal(1e-12));
        let q = quat_from_rotation(&r);
        let r2 = rotation_from_quat(q);
        assert!(r.max_abs_diff(&r2) < 1e-12);
    }

    #[test]
    fn rotation_near_pi_round_trip() {
        for axis in [Vec3::x_hat(), Vec3::y_hat(), Vec3::new(1.0, -1.0, 0.3)] {
            let r = M3::rotation_axis_angle(axis, std::f64::consts::PI - 1e-9);
            let r2 = rotation_from_quat(quat_from_rotation(&r));
            assert!(r.max_abs_diff(&r2) < 1e-8);
        }
    }

    #[test]
    fn su2_covers_rotation() {
        // U (σ·v) U† must equal σ·(R v)
        let r = M3::rotation_axis_angle(Vec3::new(0.3, -1.0, 2.0), 2.5);
        let u = su2_from_quat(quat_from_rotation(&r));
        for v in [Vec3::x_hat(), Vec3::y_hat(), Vec3::z_hat()] {
            let sigma_v = CMat2::pauli_x()
                .scale_re(v.0[0])
                .add(&CMat2::pauli_y().scale_re(v.0[1]))
                .add(&CMat2::pauli_z().scale_re(v.0[2]));
            let lhs = u.mul(&sigma_v).mul(&u.adjoint());
            let rv = r.mul_vec(&v);
            let rhs = CMat2::pauli_x()
                .scale_re(rv.0[0])
                .add(&CMat2::pauli_y().scale_re(rv.0[1]))
                .add(&CMat2::pauli_z().scale_re(rv.0[2]));
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn bloch_round_trip() {
        let v: Vec3<f64> = Vec3::new(0.2, -0.4, 0.5);
        let rho = CMat2::density_from_bloch(&v);
        assert!(rho.bloch().max_abs_diff(&v) < 1e-15);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_small_matrices() {
        let ev = sym_eigenvalues([[2.0f64, 1.0], [1.0, 2.0]]);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);

        // diag under an orthogonal conjugation keeps its spectrum
        let r = M3::rotation_axis_angle(Vec3::new(1.0, 1.0, 1.0), 0.8);
        let d = M3::diag(-2.0, 0.5, 7.0);
        let m = r.mul(&d).mul(&r.transpose());
        let ev = sym_eigenvalues(m.0);
        for (got, want) in ev.iter().zip([-2.0, 0.5, 7.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn hermitian_eigenvalues_via_embedding() {
        // Pauli Y ⊗ Y: eigenvalues ±1 (each twice)
        let yy = CMat4::kron(&CMat2::<f64>::pauli_y(), &CMat2::pauli_y());
        let ev = yy.hermitian_eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-12);
        assert!((ev[1] + 1.0).abs() < 1e-12);
        assert!((ev[2] - 1.0).abs() < 1e-12);
        assert!((ev[3] - 1.0).abs() < 1e-12);
    }
}
