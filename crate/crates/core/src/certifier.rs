//! Certified global upper bounds for Lipschitz functions on boxes.
//!
//! A box with center value f(c) is eliminated once
//! `f(c) + ι·radius ≤ λ − fp_margin` (for a cube of edge Δ the radius is
//! √n·Δ/2); otherwise it splits into 2ⁿ children. A center exceeding
//! λ − fp_margin refutes the strengthened inequality and is reported as a
//! witness. Boxes inside exclusion regions are dropped; boxes straddling an
//! exclusion are clipped exactly into axis-aligned remainder pieces.
//!
//! The whole tree is explored to natural termination (no early abort), so the
//! verdict, the maximum observed center value and the witness are independent
//! of worker count and scheduling. Runs truncated by the evaluation budget
//! return their unresolved frontier, which can be checkpointed and resumed.

use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// serde for const-generic arrays (derive only covers literal lengths).
mod array_format {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S, T, const N: usize>(arr: &[T; N], s: S) -> Result<S::Ok, S::Error>
    where
        S: Serializer,
        T: Serialize,
    {
        arr.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D, T, const N: usize>(d: D) -> Result<[T; N], D::Error>
    where
        D: Deserializer<'de>,
        T: Deserialize<'de>,
    {
        let v = Vec::<T>::deserialize(d)?;
        let len = v.len();
        v.try_into()
            .map_err(|_| D::Error::custom(format!("expected {N} elements, got {len}")))
    }
}

/// Axis-aligned box given by per-axis closed intervals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: serde::Serialize",
    deserialize = "T: serde::de::DeserializeOwned"
))]
pub struct Aabb<T, const N: usize> {
    #[serde(with = "array_format")]
    pub lo: [T; N],
    #[serde(with = "array_format")]
    pub hi: [T; N],
}

impl<T: Real, const N: usize> Aabb<T, N> {
    pub fn new(lo: [T; N], hi: [T; N]) -> Result<Self> {
        for i in 0..N {
            if !(lo[i] < hi[i]) {
                return Err(Error::InvalidConfig(format!(
                    "axis {i}: need lo < hi, got [{}, {}]",
                    lo[i], hi[i]
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// Cube [lo, lo+edge]^N.
    pub fn cube(lo: T, hi: T) -> Result<Self> {
        Self::new([lo; N], [hi; N])
    }

    pub fn widths(&self) -> [T; N] {
        let mut w = [T::zero(); N];
        for i in 0..N {
            w[i] = self.hi[i] - self.lo[i];
        }
        w
    }

    pub fn volume(&self) -> T {
        self.widths().iter().fold(T::one(), |a, &w| a * w)
    }

    /// Interiors overlap (shared faces do not count).
    pub fn overlaps(&self, other: &Self) -> bool {
        (0..N).all(|i| self.lo[i] < other.hi[i] && self.hi[i] > other.lo[i])
    }

    pub fn contains_box(&self, other: &Self) -> bool {
        (0..N).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }

    pub fn intersection(&self, other: &Self) -> Option<Self> {
        let mut lo = [T::zero(); N];
        let mut hi = [T::zero(); N];
        for i in 0..N {
            lo[i] = self.lo[i].max(other.lo[i]);
            hi[i] = self.hi[i].min(other.hi[i]);
            if !(lo[i] < hi[i]) {
                return None;
            }
        }
        Some(Self { lo, hi })
    }
}

/// A node of the subdivision tree.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: serde::Serialize",
    deserialize = "T: serde::de::DeserializeOwned"
))]
pub struct HyperBox<T, const N: usize> {
    #[serde(with = "array_format")]
    pub lo: [T; N],
    #[serde(with = "array_format")]
    pub hi: [T; N],
    pub depth: u32,
}

impl<T: Real, const N: usize> HyperBox<T, N> {
    pub fn from_aabb(region: &Aabb<T, N>, depth: u32) -> Self {
        Self {
            lo: region.lo,
            hi: region.hi,
            depth,
        }
    }

    pub fn region(&self) -> Aabb<T, N> {
        Aabb {
            lo: self.lo,
            hi: self.hi,
        }
    }

    pub fn center(&self) -> [T; N] {
        let mut c = [T::zero(); N];
        for i in 0..N {
            c[i] = (self.lo[i] + self.hi[i]) * T::half();
        }
        c
    }

    /// Half the diagonal: max distance from the center to any point inside.
    pub fn radius(&self) -> T {
        let mut s = T::zero();
        for i in 0..N {
            let h = (self.hi[i] - self.lo[i]) * T::half();
            s += h * h;
        }
        s.sqrt()
    }

    pub fn volume(&self) -> T {
        self.region().volume()
    }

    /// The 2ⁿ children obtained by splitting every axis at its midpoint.
    /// Children tile the parent exactly (shared boundaries are shared bits).
    pub fn subdivide(&self) -> Vec<HyperBox<T, N>> {
        let mid = self.center();
        let mut children = Vec::with_capacity(1 << N);
        for mask in 0..(1u32 << N) {
            let mut lo = self.lo;
            let mut hi = mid;
            for i in 0..N {
                if mask & (1 << i) != 0 {
                    lo[i] = mid[i];
                    hi[i] = self.hi[i];
                }
            }
            children.push(HyperBox {
                lo,
                hi,
                depth: self.depth + 1,
            });
        }
        children
    }
}

/// f(center) + √n·half_edge·ι — the Lipschitz upper bound over a cube of
/// half-edge `half_edge` (edge Δ = 2·half_edge).
pub fn box_upper_bound<T: Real>(f_center: T, half_edge: T, n: u32, lipschitz: T) -> T {
    f_center + T::of(n as f64).sqrt() * half_edge * lipschitz
}

/// Smallest grid step that can close a certification with gap `gap`:
/// Δ = 2·gap/(ι·√n).
pub fn min_grid_step<T: Real>(gap: T, lipschitz: T, n: u32) -> Result<T> {
    if gap <= T::zero() || lipschitz <= T::zero() || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need gap > 0, lipschitz > 0, n >= 1; got {gap}, {lipschitz}, {n}"
        )));
    }
    Ok(T::two() * gap / (lipschitz * T::of(n as f64).sqrt()))
}

/// Engine knobs; `objective_tag` identifies the objective in checkpoints.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: serde::Serialize",
    deserialize = "T: serde::de::DeserializeOwned"
))]
pub struct CertSettings<T> {
    pub lipschitz: T,
    pub threshold: T,
    pub fp_margin: T,
    pub initial_delta: T,
    pub max_depth: u32,
    pub budget: u64,
    pub workers: usize,
    pub objective_tag: String,
}

impl<T: Real> CertSettings<T> {
    pub fn new(lipschitz: T, threshold: T, objective_tag: impl Into<String>) -> Self {
        Self {
            lipschitz,
            threshold,
            fp_margin: T::of(1e-9),
            initial_delta: T::of(0.125),
            max_depth: 60,
            budget: 1_000_000_000,
            workers: 1,
            objective_tag: objective_tag.into(),
        }
    }
}

/// A certification task: prove objective ≤ threshold on domain ∖ exclusions.
pub struct CertProblem<'f, T, const N: usize> {
    pub objective: &'f (dyn Fn(&[T; N]) -> T + Sync),
    pub domain: Aabb<T, N>,
    pub exclusions: Vec<Aabb<T, N>>,
    pub settings: CertSettings<T>,
}

/// The problem identity covered by the config hash (budget and worker count
/// are execution resources, deliberately not part of the identity).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: serde::Serialize",
    deserialize = "T: serde::de::DeserializeOwned"
))]
pub struct CertConfig<T, const N: usize> {
    pub schema_version: u32,
    pub objective_tag: String,
    pub domain: Aabb<T, N>,
    pub exclusions: Vec<Aabb<T, N>>,
    pub lipschitz: T,
    pub threshold: T,
    pub fp_margin: T,
    pub initial_delta: T,
    pub max_depth: u32,
}

impl<'f, T: Real, const N: usize> CertProblem<'f, T, N> {
    pub fn config(&self) -> CertConfig<T, N> {
        CertConfig {
            schema_version: 1,
            objective_tag: self.settings.objective_tag.clone(),
            domain: self.domain,
            exclusions: self.exclusions.clone(),
            lipschitz: self.settings.lipschitz,
            threshold: self.settings.threshold,
            fp_margin: self.settings.fp_margin,
            initial_delta: self.settings.initial_delta,
            max_depth: self.settings.max_depth,
        }
    }

    pub fn config_hash(&self) -> String {
        config_hash(&self.config())
    }
}

/// FNV-1a over the canonical JSON encoding.
pub fn config_hash<T: Real, const N: usize>(config: &CertConfig<T, N>) -> String {
    let text = serde_json::to_string(config).expect("config serializes");
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertStatus {
    /// Every non-excluded box was eliminated: objective ≤ threshold − fp_margin
    /// could be extended to... the claim is objective ≤ threshold on the domain.
    Certified,
    /// Some center evaluates above threshold − fp_margin.
    RefutedAtPoint,
    /// Budget or depth cap hit; `frontier` holds the unresolved boxes.
    BudgetExceeded,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: serde::Serialize",
    deserialize = "T: serde::de::DeserializeOwned"
))]
pub struct CertificateReport<T, const N: usize> {
    pub status: CertStatus,
    pub boxes_processed: u64,
    pub eliminated: u64,
    pub excluded: u64,
    pub subdivided: u64,
    pub refuted: u64,
    /// Total volume of eliminated boxes (with the excluded and frontier
    /// volumes this accounts for the whole domain on non-refuted runs).
    pub eliminated_volume: T,
    pub excluded_volume: T,
    pub max_center_value: T,
    pub witness: Option<Witness<T, N>>,
    pub frontier: Vec<HyperBox<T, N>>,
    pub config: CertConfig<T, N>,
    pub config_hash: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: serde::Serialize",
    deserialize = "T: serde::de::DeserializeOwned"
))]
pub struct Witness<T, const N: usize> {
    #[serde(with = "array_format")]
    pub point: [T; N],
    pub value: T,
}

// ---------------------------------------------------------------------------
// engine
// ---------------------------------------------------------------------------

struct Shared<'p, 'f, T, const N: usize> {
    problem: &'p CertProblem<'f, T, N>,
    cutoff: T,
    evals: AtomicU64,
    /// Once any center refutes, remaining subtrees are pruned: near the level
    /// set f = cutoff boxes would otherwise subdivide to the depth cap. The
    /// verdict stays schedule-independent (the subdivision tree is
    /// deterministic and contains a refuting center whenever one schedule
    /// finds one); only the post-refutation counters depend on timing.
    refuted_flag: AtomicBool,
}

#[derive(Clone, Debug)]
struct Tally<T, const N: usize> {
    processed: u64,
    eliminated: u64,
    excluded: u64,
    subdivided: u64,
    refuted: u64,
    eliminated_volume: T,
    excluded_volume: T,
    max_center: Option<T>,
    witness: Option<Witness<T, N>>,
    frontier: Vec<HyperBox<T, N>>,
}

impl<T: Real, const N: usize> Tally<T, N> {
    fn empty() -> Self {
        Tally {
            processed: 0,
            eliminated: 0,
            excluded: 0,
            subdivided: 0,
            refuted: 0,
            eliminated_volume: T::zero(),
            excluded_volume: T::zero(),
            max_center: None,
            witness: None,
            frontier: Vec::new(),
        }
    }

    fn merge(mut self, mut other: Self) -> Self {
        self.processed += other.processed;
        self.eliminated += other.eliminated;
        self.excluded += other.excluded;
        self.subdivided += other.subdivided;
        self.refuted += other.refuted;
        self.eliminated_volume += other.eliminated_volume;
        self.excluded_volume += other.excluded_volume;
        self.max_center = match (self.max_center, other.max_center) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self.witness = merge_witness(self.witness, other.witness);
        self.frontier.append(&mut other.frontier);
        self
    }
}

/// Larger value wins; ties broken toward the lexicographically smaller point
/// so the reported witness never depends on scheduling.
fn merge_witness<T: Real, const N: usize>(
    a: Option<Witness<T, N>>,
    b: Option<Witness<T, N>>,
) -> Option<Witness<T, N>> {
    match (a, b) {
        (Some(x), Some(y)) => {
            if x.value > y.value {
                Some(x)
            } else if y.value > x.value {
                Some(y)
            } else {
                let x_first = x
                    .point
                    .iter()
                    .zip(y.point.iter())
                    .find_map(|(p, q)| {
                        if p < q {
                            Some(true)
                        } else if q < p {
                            Some(false)
                        } else {
                            None
                        }
                    })
                    .unwrap_or(true);
                Some(if x_first { x } else { y })
            }
        }
        (x, y) => x.or(y),
    }
}

/// Decreasing center value; ties keep construction order (stable sort).
fn sort_by_value_desc<T: Real, const N: usize>(items: &mut [(T, HyperBox<T, N>)]) {
    items.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite objective values"));
}

/// Subtract `excl` from `bx`, pushing the exact axis-aligned remainder slabs.
fn subtract_box<T: Real, const N: usize>(
    bx: &HyperBox<T, N>,
    excl: &Aabb<T, N>,
    out: &mut Vec<HyperBox<T, N>>,
) {
    let mut cur = *bx;
    for i in 0..N {
        if cur.lo[i] < excl.lo[i] {
            let mut piece = cur;
            piece.hi[i] = excl.lo[i];
            if piece.lo[i] < piece.hi[i] {
                out.push(piece);
            }
            cur.lo[i] = excl.lo[i];
        }
        if cur.hi[i] > excl.hi[i] {
            let mut piece = cur;
            piece.lo[i] = excl.hi[i];
            if piece.lo[i] < piece.hi[i] {
                out.push(piece);
            }
            cur.hi[i] = excl.hi[i];
        }
    }
    // what remains of `cur` lies inside `excl` and is dropped
}

/// Route a box through the exclusion list starting at index `from`; boxes
/// fully inside an exclusion are counted, partial overlaps are clipped.
fn route_box<T: Real, const N: usize>(
    bx: HyperBox<T, N>,
    exclusions: &[Aabb<T, N>],
    from: usize,
    out: &mut Vec<HyperBox<T, N>>,
    excluded: &mut u64,
    excluded_volume: &mut T,
) {
    for (k, excl) in exclusions.iter().enumerate().skip(from) {
        if !excl.overlaps(&bx.region()) {
            continue;
        }
        if excl.contains_box(&bx.region()) {
            *excluded += 1;
            *excluded_volume += bx.volume();
            return;
        }
        let mut pieces = Vec::new();
        let mut inner = bx;
        subtract_box(&bx, excl, &mut pieces);
        // the part swallowed by `excl` is the box clipped to it
        if let Some(core) = excl.intersection(&bx.region()) {
            inner = HyperBox::from_aabb(&core, bx.depth);
        }
        *excluded += 1;
        *excluded_volume += inner.volume();
        for piece in pieces {
            route_box(piece, exclusions, k + 1, out, excluded, excluded_volume);
        }
        return;
    }
    out.push(bx);
}

impl<'p, 'f, T: Real, const N: usize> Shared<'p, 'f, T, N> {
    fn try_take_eval(&self) -> bool {
        let mut cur = self.evals.load(Ordering::Relaxed);
        loop {
            if cur >= self.problem.settings.budget {
                return false;
            }
            match self.evals.compare_exchange_weak(
                cur,
                cur + 1,
                Ordering::Relaxed,
                Ordering::Relaxed,
            ) {
                Ok(_) => return true,
                Err(now) => cur = now,
            }
        }
    }

    /// Evaluate a box center (or record why it cannot be evaluated).
    fn evaluate(&self, bx: HyperBox<T, N>, tally: &mut Tally<T, N>) -> Option<(T, HyperBox<T, N>)> {
        if self.refuted_flag.load(Ordering::Relaxed) {
            return None;
        }
        if !self.try_take_eval() {
            tally.frontier.push(bx);
            return None;
        }
        let center = bx.center();
        let value = (self.problem.objective)(&center);
        tally.processed += 1;
        tally.max_center = Some(match tally.max_center {
            Some(m) => m.max(value),
            None => value,
        });
        if value > self.cutoff {
            self.refuted_flag.store(true, Ordering::Relaxed);
            tally.refuted += 1;
            tally.witness = merge_witness(
                tally.witness,
                Some(Witness {
                    point: center,
                    value,
                }),
            );
            return None;
        }
        Some((value, bx))
    }

    /// Classify an evaluated box; subdivision evaluates all children first
    /// and recurses in decreasing value order, so runs whose supremum crosses
    /// the cutoff find a refuting center before descending into the
    /// never-eliminable cascade hugging the level set from below.
    fn process_value(&self, bx: HyperBox<T, N>, value: T) -> Tally<T, N> {
        let mut tally = Tally::empty();
        if self.refuted_flag.load(Ordering::Relaxed) {
            return tally;
        }
        if value + self.problem.settings.lipschitz * bx.radius() <= self.cutoff {
            tally.eliminated = 1;
            tally.eliminated_volume = bx.volume();
            return tally;
        }
        if bx.depth >= self.problem.settings.max_depth {
            tally.frontier.push(bx);
            return tally;
        }

        tally.subdivided = 1;
        let mut routed = Vec::with_capacity(1 << N);
        for child in bx.subdivide() {
            route_box(
                child,
                &self.problem.exclusions,
                0,
                &mut routed,
                &mut tally.excluded,
                &mut tally.excluded_volume,
            );
        }
        let mut evaluated: Vec<(T, HyperBox<T, N>)> = Vec::with_capacity(routed.len());
        for child in routed {
            if let Some(pair) = self.evaluate(child, &mut tally) {
                evaluated.push(pair);
            }
        }
        sort_by_value_desc(&mut evaluated);

        let child_tally = evaluated
            .into_par_iter()
            .map(|(v, child)| self.process_value(child, v))
            .reduce(Tally::empty, Tally::merge);
        tally.merge(child_tally)
    }
}

fn validate<T: Real, const N: usize>(problem: &CertProblem<'_, T, N>) -> Result<()> {
    let s = &problem.settings;
    if s.initial_delta <= T::zero() {
        return Err(Error::InvalidConfig(format!(
            "initial_delta must be positive, got {}",
            s.initial_delta
        )));
    }
    if s.lipschitz < T::zero() || s.fp_margin < T::zero() {
        return Err(Error::InvalidConfig(
            "lipschitz and fp_margin must be nonnegative".into(),
        ));
    }
    if s.budget == 0 {
        return Err(Error::InvalidConfig("budget must be at least 1".into()));
    }
    if s.workers == 0 {
        return Err(Error::InvalidConfig("workers must be at least 1".into()));
    }
    Aabb::new(problem.domain.lo, problem.domain.hi)?;
    Ok(())
}

/// Initial cover: per-axis counts ⌈len/δ₀⌉, cell boundaries placed by exact
/// fractions so the outer boundary is the domain edge bit-for-bit.
fn initial_grid<T: Real, const N: usize>(problem: &CertProblem<'_, T, N>) -> Vec<HyperBox<T, N>> {
    let d = &problem.domain;
    let mut counts = [0usize; N];
    for i in 0..N {
        let len = d.hi[i] - d.lo[i];
        let k = (len / problem.settings.initial_delta).ceil();
        counts[i] = k.to_f64().map(|v| v as usize).unwrap_or(1).max(1);
    }
    let boundary = |i: usize, j: usize| -> T {
        if j == 0 {
            d.lo[i]
        } else if j == counts[i] {
            d.hi[i]
        } else {
            let frac = T::of(j as f64) / T::of(counts[i] as f64);
            d.lo[i] + (d.hi[i] - d.lo[i]) * frac
        }
    };

    let mut cells = Vec::new();
    let mut index = [0usize; N];
    'outer: loop {
        let mut lo = [T::zero(); N];
        let mut hi = [T::zero(); N];
        for i in 0..N {
            lo[i] = boundary(i, index[i]);
            hi[i] = boundary(i, index[i] + 1);
        }
        cells.push(HyperBox { lo, hi, depth: 0 });
        let mut axis = 0;
        loop {
            index[axis] += 1;
            if index[axis] < counts[axis] {
                break;
            }
            index[axis] = 0;
            axis += 1;
            if axis == N {
                break 'outer;
            }
        }
    }
    cells
}

struct Carried<T> {
    processed: u64,
    eliminated: u64,
    excluded: u64,
    subdivided: u64,
    refuted: u64,
    eliminated_volume: T,
    excluded_volume: T,
    max_center: Option<T>,
}

fn run<T: Real, const N: usize>(
    problem: &CertProblem<'_, T, N>,
    roots: Vec<HyperBox<T, N>>,
    carried: Carried<T>,
) -> Result<CertificateReport<T, N>> {
    let shared = Shared {
        problem,
        cutoff: problem.settings.threshold - problem.settings.fp_margin,
        evals: AtomicU64::new(carried.processed),
        refuted_flag: AtomicBool::new(false),
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(problem.settings.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let tally = pool.install(|| {
        let mut root_tally = Tally::empty();
        let mut evaluated = Vec::with_capacity(roots.len());
        for bx in roots {
            if let Some(pair) = shared.evaluate(bx, &mut root_tally) {
                evaluated.push(pair);
            }
        }
        sort_by_value_desc(&mut evaluated);
        let rest = evaluated
            .into_par_iter()
            .map(|(v, bx)| shared.process_value(bx, v))
            .reduce(Tally::empty, Tally::merge);
        root_tally.merge(rest)
    });

    let refuted_total = carried.refuted + tally.refuted;
    let status = if refuted_total > 0 {
        CertStatus::RefutedAtPoint
    } else if tally.frontier.is_empty() {
        CertStatus::Certified
    } else {
        CertStatus::BudgetExceeded
    };
    let max_center_value = match (carried.max_center, tally.max_center) {
        (Some(a), Some(b)) => a.max(b),
        (a, b) => a.or(b).unwrap_or_else(|| -T::infinity()),
    };
    Ok(CertificateReport {
        status,
        boxes_processed: carried.processed + tally.processed,
        eliminated: carried.eliminated + tally.eliminated,
        excluded: carried.excluded + tally.excluded,
        subdivided: carried.subdivided + tally.subdivided,
        refuted: refuted_total,
        eliminated_volume: carried.eliminated_volume + tally.eliminated_volume,
        excluded_volume: carried.excluded_volume + tally.excluded_volume,
        max_center_value,
        witness: tally.witness,
        frontier: tally.frontier,
        config: problem.config(),
        config_hash: problem.config_hash(),
    })
}

/// Certify `objective ≤ threshold` on `domain ∖ exclusions`.
pub fn certify<T: Real, const N: usize>(
    problem: &CertProblem<'_, T, N>,
) -> Result<CertificateReport<T, N>> {
    validate(problem)?;
    let mut excluded = 0u64;
    let mut excluded_volume = T::zero();
    let mut roots = Vec::new();
    for cell in initial_grid(problem) {
        route_box(
            cell,
            &problem.exclusions,
            0,
            &mut roots,
            &mut excluded,
            &mut excluded_volume,
        );
    }
    run(
        problem,
        roots,
        Carried {
            processed: 0,
            eliminated: 0,
            excluded,
            subdivided: 0,
            refuted: 0,
            eliminated_volume: T::zero(),
            excluded_volume,
            max_center: None,
        },
    )
}

// ---------------------------------------------------------------------------
// checkpointing
// ---------------------------------------------------------------------------

/// Durable snapshot of an interrupted run. The JSON encoding round-trips
/// floats bit-exactly (shortest-representation formatting).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: serde::Serialize",
    deserialize = "T: serde::de::DeserializeOwned"
))]
pub struct Checkpoint<T, const N: usize> {
    pub schema: String,
    pub version: u32,
    pub config: CertConfig<T, N>,
    pub config_hash: String,
    pub boxes_processed: u64,
    pub eliminated: u64,
    pub excluded: u64,
    pub subdivided: u64,
    pub refuted: u64,
    pub eliminated_volume: T,
    pub excluded_volume: T,
    pub max_center_value: Option<T>,
    pub frontier: Vec<HyperBox<T, N>>,
}

pub const CHECKPOINT_SCHEMA: &str = "bellcert.certifier.checkpoint";

impl<T: Real, const N: usize> Checkpoint<T, N> {
    pub fn from_report(report: &CertificateReport<T, N>) -> Self {
        Checkpoint {
            schema: CHECKPOINT_SCHEMA.into(),
            version: 1,
            config: report.config.clone(),
            config_hash: report.config_hash.clone(),
            boxes_processed: report.boxes_processed,
            eliminated: report.eliminated,
            excluded: report.excluded,
            subdivided: report.subdivided,
            refuted: report.refuted,
            eliminated_volume: report.eliminated_volume,
            excluded_volume: report.excluded_volume,
            max_center_value: Some(report.max_center_value),
            frontier: report.frontier.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ckpt: Checkpoint<T, N> =
            serde_json::from_str(text).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if ckpt.schema != CHECKPOINT_SCHEMA {
            return Err(Error::Checkpoint(format!(
                "unknown schema {:?}",
                ckpt.schema
            )));
        }
        let expected = config_hash(&ckpt.config);
        if ckpt.config_hash != expected {
            return Err(Error::Checkpoint(
                "stored config hash does not match stored config".into(),
            ));
        }
        Ok(ckpt)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

/// Continue a budget-exceeded run. The checkpoint must match the problem
/// configuration (hash-verified); the budget counts total evaluations
/// including the prior run, so resuming with a larger budget extends it.
pub fn resume<T: Real, const N: usize>(
    problem: &CertProblem<'_, T, N>,
    checkpoint: &Checkpoint<T, N>,
) -> Result<CertificateReport<T, N>> {
    validate(problem)?;
    let expected = problem.config_hash();
    if checkpoint.config_hash != expected {
        return Err(Error::ConfigHashMismatch {
            expected,
            found: checkpoint.config_hash.clone(),
        });
    }
    run(
        problem,
        checkpoint.frontier.clone(),
        Carried {
            processed: checkpoint.boxes_processed,
            eliminated: checkpoint.eliminated,
            excluded: checkpoint.excluded,
            subdivided: checkpoint.subdivided,
            refuted: checkpoint.refuted,
            eliminated_volume: checkpoint.eliminated_volume,
            excluded_volume: checkpoint.excluded_volume,
            max_center: checkpoint.max_center_value,
        },
    )
}
