//! The block-diagonal CHSH model: three Jordan blocks per side at angles
//! 0, π/2, π, the nine two-qubit CHSH observables they induce, the
//! block-sparse state family, its CHSH score, the exact extraction-fidelity
//! oracle over six-channel strategies, and the reduction of a strategy to the
//! five bound variables.

use std::collections::BTreeMap;

use crate::bounds::{Branch, ReducedPoint};
use crate::error::{Error, Result};
use crate::linalg::{CMat2, CMat4};
use crate::qubit::{
    channel_singular_values, extracted_block_fidelity, kraus_from_params, ExtremalChannelParams,
    TwoQubitOperator,
};
use crate::scalar::Real;

/// Weights (ν, p_C, q) of the block-diagonal state family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateFamilyParams<T> {
    pub nu: T,
    pub p_c: T,
    pub q: T,
}

impl<T: Real> StateFamilyParams<T> {
    pub fn new(nu: T, p_c: T, q: T) -> Result<Self> {
        for (name, v) in [("nu", nu), ("p_c", p_c), ("q", q)] {
            if !(T::zero()..=T::one()).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0,1], got {v}"
                )));
            }
        }
        Ok(Self { nu, p_c, q })
    }

    /// The published example: ν = 0.061, p_C = 0.61381508, q = ½.
    pub fn published() -> Self {
        Self {
            nu: T::of(0.061),
            p_c: T::of(0.61381508),
            q: T::half(),
        }
    }
}

/// Pair of register labels (i for Alice, j for Bob), each in {0, 1, 2}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockLabel {
    pub i: u8,
    pub j: u8,
}

impl BlockLabel {
    pub fn new(i: u8, j: u8) -> Result<Self> {
        if i > 2 || j > 2 {
            return Err(Error::InvalidParameter(format!(
                "block labels must lie in 0..=2, got ({i},{j})"
            )));
        }
        Ok(Self { i, j })
    }

    /// The six labels carrying weight in the state family.
    pub fn support() -> [BlockLabel; 6] {
        [
            BlockLabel { i: 0, j: 0 },
            BlockLabel { i: 0, j: 2 },
            BlockLabel { i: 1, j: 1 },
            BlockLabel { i: 2, j: 0 },
            BlockLabel { i: 2, j: 1 },
            BlockLabel { i: 2, j: 2 },
        ]
    }
}

/// Block-sparse two-qudit state: per-label weights and 4×4 blocks.
#[derive(Clone, Debug)]
pub struct StateBlocks<T> {
    pub weights: BTreeMap<BlockLabel, T>,
    pub blocks: BTreeMap<BlockLabel, TwoQubitOperator<T>>,
}

/// One extremal channel per register on each side.
#[derive(Clone, Debug)]
pub struct Strategy<T> {
    pub alice: [ExtremalChannelParams<T>; 3],
    pub bob: [ExtremalChannelParams<T>; 3],
}

impl<T: Real> Strategy<T> {
    /// Discard-and-prepare |0⟩ on every register: fidelity exactly ½.
    pub fn discard_and_prepare() -> Self {
        let ad = ExtremalChannelParams::amplitude_damping();
        Strategy {
            alice: [ad, ad, ad],
            bob: [ad, ad, ad],
        }
    }

    pub fn all_identity() -> Self {
        let id = ExtremalChannelParams::identity();
        Strategy {
            alice: [id, id, id],
            bob: [id, id, id],
        }
    }
}

/// S = 2 + (2√2 − 2)·ν.
pub fn chsh_score<T: Real>(nu: T) -> Result<T> {
    if !(T::zero()..=T::one()).contains(&nu) {
        return Err(Error::InvalidParameter(format!(
            "nu must lie in [0,1], got {nu}"
        )));
    }
    Ok(T::two() + (T::two() * T::SQRT_2() - T::two()) * nu)
}

/// Qubit observables of block i: A₀ = Z and A₁ = cos(iπ/2)Z + sin(iπ/2)X.
fn alice_observables<T: Real>(i: u8) -> (CMat2<T>, CMat2<T>) {
    let angle = T::FRAC_PI_2() * T::of(i as f64);
    let (s, c) = angle.sin_cos();
    let a1 = CMat2::pauli_z()
        .scale_re(c)
        .add(&CMat2::pauli_x().scale_re(s));
    (CMat2::pauli_z(), a1)
}

/// Qubit observables of block j: B₀ = H₊ and B₁ = cos(jπ/2)H₊ + sin(jπ/2)H₋.
fn bob_observables<T: Real>(j: u8) -> (CMat2<T>, CMat2<T>) {
    let angle = T::FRAC_PI_2() * T::of(j as f64);
    let (s, c) = angle.sin_cos();
    let b1 = CMat2::h_plus()
        .scale_re(c)
        .add(&CMat2::h_minus().scale_re(s));
    (CMat2::h_plus(), b1)
}

/// The nine two-qubit CHSH observables W^{ij} = A₀ⁱ⊗(B₀ʲ+B₁ʲ) + A₁ⁱ⊗(B₀ʲ−B₁ʲ).
pub fn block_observables<T: Real>() -> BTreeMap<BlockLabel, TwoQubitOperator<T>> {
    let mut map = BTreeMap::new();
    for i in 0..3u8 {
        for j in 0..3u8 {
            let (a0, a1) = alice_observables::<T>(i);
            let (b0, b1) = bob_observables::<T>(j);
            let w = CMat4::kron(&a0, &b0.add(&b1)).add(&CMat4::kron(&a1, &b0.sub(&b1)));
            map.insert(BlockLabel { i, j }, TwoQubitOperator(w));
        }
    }
    map
}

/// ¼(I ± Z) ⊗ (I + H₊), the corner product states.
fn corner_state<T: Real>(z_sign: T) -> TwoQubitOperator<T> {
    let left = CMat2::identity().add(&CMat2::pauli_z().scale_re(z_sign));
    let right = CMat2::identity().add(&CMat2::h_plus());
    TwoQubitOperator(CMat4::kron(&left, &right).scale_re(T::of(0.25)))
}

/// Assemble the state family: weights and blocks on the six-label support.
pub fn build_state<T: Real>(p: &StateFamilyParams<T>) -> Result<StateBlocks<T>> {
    let p = StateFamilyParams::new(p.nu, p.p_c, p.q)?;
    let rest = T::one() - p.nu;
    let quarter = T::of(0.25);

    let mut weights = BTreeMap::new();
    weights.insert(BlockLabel { i: 1, j: 1 }, p.nu);
    let corner_top = rest * p.p_c * p.q * T::half();
    let corner_bottom = rest * p.p_c * (T::one() - p.q) * T::half();
    weights.insert(BlockLabel { i: 0, j: 0 }, corner_top);
    weights.insert(BlockLabel { i: 0, j: 2 }, corner_top);
    weights.insert(BlockLabel { i: 2, j: 0 }, corner_bottom);
    weights.insert(BlockLabel { i: 2, j: 2 }, corner_bottom);
    weights.insert(BlockLabel { i: 2, j: 1 }, rest * (T::one() - p.p_c));

    let mut blocks = BTreeMap::new();
    blocks.insert(BlockLabel { i: 1, j: 1 }, TwoQubitOperator::phi_plus());
    let rho21 = TwoQubitOperator(
        CMat4::identity()
            .add(&CMat4::kron(&CMat2::pauli_z(), &CMat2::h_minus()))
            .scale_re(quarter),
    );
    blocks.insert(BlockLabel { i: 2, j: 1 }, rho21);
    blocks.insert(BlockLabel { i: 2, j: 2 }, corner_state(-T::one()));
    for label in [
        BlockLabel { i: 0, j: 0 },
        BlockLabel { i: 0, j: 2 },
        BlockLabel { i: 2, j: 0 },
    ] {
        blocks.insert(label, corner_state(T::one()));
    }
    Ok(StateBlocks { weights, blocks })
}

/// tr(W^{ij} ρ^{ij}) per supported block.
pub fn block_scores<T: Real>(s: &StateBlocks<T>) -> BTreeMap<BlockLabel, T> {
    let observables = block_observables::<T>();
    s.blocks
        .iter()
        .map(|(label, rho)| {
            let w = &observables[label];
            (*label, w.0.mul(&rho.0).trace().re)
        })
        .collect()
}

/// Σ w_ij · tr(W^{ij} ρ^{ij}); equals `chsh_score(ν)` for any (p_C, q).
pub fn total_score<T: Real>(s: &StateBlocks<T>) -> T {
    let scores = block_scores(s);
    s.weights.iter().map(|(label, w)| *w * scores[label]).sum()
}

/// Exact extracted singlet fidelity of a six-channel strategy:
/// Σ w_ij ⟨Φ⁺|(Λ_Aⁱ⊗Λ_Bʲ)[ρ^{ij}]|Φ⁺⟩.
pub fn oracle_fidelity<T: Real>(p: &StateFamilyParams<T>, strat: &Strategy<T>) -> Result<T> {
    let state = build_state(p)?;
    let mut kraus_a = Vec::with_capacity(3);
    let mut kraus_b = Vec::with_capacity(3);
    for r in 0..3 {
        kraus_a.push(kraus_from_params(&strat.alice[r])?);
        kraus_b.push(kraus_from_params(&strat.bob[r])?);
    }
    let mut total = T::zero();
    for (label, w) in &state.weights {
        let rho = &state.blocks[label];
        let f =
            extracted_block_fidelity(&kraus_a[label.i as usize], &kraus_b[label.j as usize], rho)?;
        total += *w * f;
    }
    Ok(total)
}

/// Map a strategy to the five variables of the closed-form bound plus the
/// sign branch. Only Λ_A¹, Λ_B¹ (via arccos of their ordered singular
/// parameters) and Λ_A² (via θ = arccos |a₂|) enter; the relaxation
/// |ζ₂| ≤ sin θ upper-bounds everything else.
pub fn reduce_strategy<T: Real>(strat: &Strategy<T>) -> (ReducedPoint<T>, Branch) {
    let order = |p: &ExtremalChannelParams<T>| {
        if p.s0 >= p.s1 {
            (p.s0, p.s1)
        } else {
            (p.s1, p.s0)
        }
    };
    let clamp01 = |x: T| x.max(-T::one()).min(T::one());

    let (s0a, s1a) = order(&strat.alice[1]);
    let (s0b, s1b) = order(&strat.bob[1]);
    let a0t = clamp01(s0a).acos();
    let a1t = clamp01(s1a).acos();
    let b0t = clamp01(s0b).acos();
    let b1t = clamp01(s1b).acos();

    // |a₂| = |s0² − s1²| of Alice's register-2 channel (rotation-invariant)
    let p2 = &strat.alice[2];
    let a2 = (p2.s0 * p2.s0 - p2.s1 * p2.s1).abs();
    let theta = clamp01(a2).acos();

    let l2a = channel_singular_values(s0a, s1a).map(|(_, l2, _)| l2);
    let l2b = channel_singular_values(s0b, s1b).map(|(_, l2, _)| l2);
    let branch = match (l2a, l2b) {
        (Ok(x), Ok(y)) if x * y < T::zero() => Branch::Minus,
        _ => Branch::Plus,
    };

    (
        ReducedPoint {
            a0t,
            a1t,
            b0t,
            b1t,
            theta,
        },
        branch,
    )
}
