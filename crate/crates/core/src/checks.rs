//! Randomized and exhaustive property sweeps. Each sweep returns a
//! [`CheckReport`] instead of panicking, so the same code drives the
//! command-line `check` command and the acceptance suite.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::automorphism::{
    self, factor_automorphism, materialize, shift_commutes_with_tower, torsion_check, ShiftWord,
};
use crate::embedding::{
    self, apply_to_matrix, conjugate_by_diagonal, normalizer_split, straighten_level, EmbeddingDescriptor,
    PartialPermutationMatrix, EXACT_TOLERANCE, PHASE_TOLERANCE,
};
use crate::gelfand::{self, PointOrder};
use crate::partition::{psize_oracle, OrderedPartition, Run};
use crate::sample;
use crate::supernatural;
use crate::tower::{load_tower, TowerSpec};

/// Outcome of one sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// Descriptions of the first few failures.
    pub examples: Vec<String>,
    /// Reason the sweep did not apply, if it did not run.
    pub skipped: Option<String>,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            cases: 0,
            failures: 0,
            examples: Vec::new(),
            skipped: None,
        }
    }

    fn skip(name: &str, reason: impl Into<String>) -> Self {
        Self {
            skipped: Some(reason.into()),
            ..Self::new(name)
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < 5 {
                self.examples.push(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(reason) = &self.skipped {
            return write!(f, "{}: skipped ({reason})", self.name);
        }
        if self.passed() {
            return write!(f, "{}: ok ({} cases)", self.name, self.cases);
        }
        write!(f, "{}: FAILED {} of {} cases", self.name, self.failures, self.cases)?;
        if let Some(first) = self.examples.first() {
            write!(f, "; first: {first}")?;
        }
        Ok(())
    }
}

/// `compose(φ, A) ≼ compose(φ, B)` whenever `A ≼ B`, for partitions of
/// `{1..m}` with `m ≤ max_m` and `φ` on `{1..m'}` with `m' ≤ max_m_prime`.
pub fn order_preservation<R: Rng + ?Sized>(rng: &mut R, cases: usize, max_m: usize, max_m_prime: usize) -> CheckReport {
    let mut report = CheckReport::new("order preservation under composition");
    for _ in 0..cases {
        let m = rng.gen_range(1..=max_m);
        let divisors: Vec<usize> = (1..=m).filter(|d| m % d == 0).collect();
        let n = divisors[rng.gen_range(0..divisors.len())];
        let mut a = sample::random_partition_with_blocks(rng, n, m / n);
        let mut b = sample::random_partition_with_blocks(rng, n, m / n);
        if a.compare(&b).expect("same shape").is_gt() {
            std::mem::swap(&mut a, &mut b);
        }
        let mult = rng.gen_range(1..=max_m_prime / m);
        let phi = sample::random_partition_with_blocks(rng, m, mult);
        let ca = phi.compose(&a).expect("compatible");
        let cb = phi.compose(&b).expect("compatible");
        report.record(ca.compare(&cb).expect("same shape").is_le(), || format!("A = {a}, B = {b}, φ = {phi}"));
    }
    report
}

/// `restrict_prefix` yields a valid ordered subpartition that keeps
/// exactly the elements of the prefix.
pub fn prefix_restriction<R: Rng + ?Sized>(rng: &mut R, cases: usize) -> CheckReport {
    let mut report = CheckReport::new("prefix restriction");
    for _ in 0..cases {
        let n = rng.gen_range(1..=6);
        let size = rng.gen_range(1..=6);
        let q = sample::random_partition_with_blocks(rng, n, size);
        let prefix = rng.gen_range(1..=q.ground_size());
        let ok = match q.restrict_prefix(prefix) {
            Ok(sub) => {
                let kept: usize = sub.blocks().iter().map(Vec::len).sum();
                sub.check().is_ok()
                    && kept == prefix
                    && sub.blocks().iter().zip(q.blocks()).all(|(s, b)| b.starts_with(s))
            }
            Err(_) => false,
        };
        report.record(ok, || format!("{q} restricted to 1..={prefix}"));
    }
    report
}

/// Every sequence of ordered runs in `{1..r}`.
fn all_run_sequences(r: usize) -> Vec<Vec<Run>> {
    fn go(start: usize, r: usize, current: &mut Vec<Run>, out: &mut Vec<Vec<Run>>) {
        if !current.is_empty() {
            out.push(current.clone());
        }
        for lo in start..=r {
            for hi in lo..=r {
                current.push(Run::new(lo, hi));
                go(hi + 1, r, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(1, r, &mut Vec::new(), &mut out);
    out
}

fn random_run_sequence<R: Rng + ?Sized>(rng: &mut R, r: usize) -> Vec<Run> {
    loop {
        let mut runs = Vec::new();
        let mut pos = 1;
        while pos <= r {
            let lo = rng.gen_range(pos..=r);
            let hi = rng.gen_range(lo..=r.min(lo + 3));
            runs.push(Run::new(lo, hi));
            pos = hi + 1 + rng.gen_range(0..2);
            if rng.gen_bool(0.3) {
                break;
            }
        }
        if !runs.is_empty() {
            return runs;
        }
    }
}

/// Cuts the image of the source runs into `n` consecutive chunks of `c`
/// elements plus an optional remainder, each of which must be a run.
fn target_runs(image: &[usize], n: usize, c: usize) -> Option<Vec<Run>> {
    if n * c > image.len() {
        return None;
    }
    let mut runs = Vec::with_capacity(n + 1);
    let chunks = image[..n * c].chunks(c).chain(Some(&image[n * c..]).filter(|rest| !rest.is_empty()));
    for chunk in chunks {
        let (lo, hi) = (chunk[0], chunk[chunk.len() - 1]);
        if hi - lo + 1 != chunk.len() {
            return None;
        }
        runs.push(Run::new(lo, hi));
    }
    Some(runs)
}

fn image_of_runs(source: &[Run], theta: &OrderedPartition) -> Vec<usize> {
    let mut image: Vec<usize> = source
        .iter()
        .flat_map(Run::iter)
        .flat_map(|x| theta.block(x).iter().copied())
        .collect();
    image.sort_unstable();
    image
}

/// Runs the oracle on every target decomposition of one `(R, θ)`,
/// recording configurations that satisfy the hypotheses.
fn psize_configurations(report: &mut CheckReport, source: &[Run], theta: &OrderedPartition) -> usize {
    let image = image_of_runs(source, theta);
    let mut satisfied = 0;
    for c in 1..=image.len() {
        let Some(target) = target_runs(&image, source.len(), c) else {
            continue;
        };
        if let Ok(verdict) = psize_oracle(source, &target, theta) {
            satisfied += 1;
            report.record(verdict, || format!("R = {source:?}, S = {target:?}, θ = {theta}"));
        }
    }
    satisfied
}

/// Every configuration with target size at most `max_s`: all ordered
/// partitions `θ`, all source run sequences, all target decompositions.
pub fn psize_exhaustive(max_s: usize) -> CheckReport {
    let mut report = CheckReport::new("run sizes (exhaustive)");
    for s in 1..=max_s {
        for r in (1..=s).filter(|r| s % r == 0) {
            let sequences = all_run_sequences(r);
            for theta in OrderedPartition::enumerate(r, s / r) {
                for source in &sequences {
                    psize_configurations(&mut report, source, &theta);
                }
            }
        }
    }
    report
}

/// Random configurations with target size in `min_s..=max_s`.
pub fn psize_random<R: Rng + ?Sized>(rng: &mut R, cases: usize, min_s: usize, max_s: usize) -> CheckReport {
    let mut report = CheckReport::new("run sizes (random)");
    let mut found = 0;
    let mut attempts = 0;
    while found < cases && attempts < cases * 1000 {
        attempts += 1;
        let r = rng.gen_range(2..=12.min(max_s));
        let low = min_s.div_ceil(r).max(1);
        let high = (max_s / r).max(low);
        let mult = rng.gen_range(low..=high);
        let theta = sample::random_partition_with_blocks(rng, r, mult);
        let source = random_run_sequence(rng, r);
        if psize_configurations(&mut report, &source, &theta) > 0 {
            found += 1;
        }
    }
    if found < cases {
        report.failures += 1;
        report.examples.push(format!("only {found} of {cases} random configurations satisfied the hypotheses"));
    }
    report
}

/// Row-major dense Kronecker product of square matrices.
pub fn kron_dense(a: &[Complex64], na: usize, b: &[Complex64], nb: usize) -> Vec<Complex64> {
    let n = na * nb;
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..na {
        for j in 0..na {
            for p in 0..nb {
                for q in 0..nb {
                    out[(i * nb + p) * n + (j * nb + q)] = a[i * na + j] * b[p * nb + q];
                }
            }
        }
    }
    out
}

fn eye(n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        out[i * n + i] = Complex64::new(1.0, 0.0);
    }
    out
}

/// `apply_to_matrix` against explicit `I⊗M`, `M⊗I` and `I⊗M⊗I`.
pub fn kronecker_agreement<R: Rng + ?Sized>(rng: &mut R, cases: usize, max_k_to: usize) -> CheckReport {
    let mut report = CheckReport::new("Kronecker agreement");
    for case in 0..cases {
        let k = rng.gen_range(1..=8.min(max_k_to));
        let room = max_k_to / k;
        let (s, t) = match case % 3 {
            0 => (rng.gen_range(1..=room), 1),
            1 => (1, rng.gen_range(1..=room)),
            _ => {
                let s = rng.gen_range(1..=room);
                (s, rng.gen_range(1..=room / s))
            }
        };
        let m = sample::random_upper_triangular(rng, k);
        let via = apply_to_matrix(&embedding::alternating(k, s, t), &m).expect("shapes agree");
        let expected = kron_dense(&kron_dense(&eye(s), s, m.entries(), k), s * k, &eye(t), t);
        let diff = via
            .entries()
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        report.record(diff <= EXACT_TOLERANCE, || format!("k = {k}, s = {s}, t = {t}: difference {diff:e}"));
    }
    report
}

/// `normalizer_split(D·W)` recovers `W` exactly and `D` on the rows of
/// `W` within tolerance, and is a fixed point on its own output.
pub fn normalizer_split_recovery<R: Rng + ?Sized>(rng: &mut R, cases: usize, max_k: usize) -> CheckReport {
    let mut report = CheckReport::new("normalizer split");
    for _ in 0..cases {
        let k = rng.gen_range(1..=max_k);
        let w = sample::random_partial_permutation(rng, k);
        let d = sample::random_diagonal_unitary(rng, k);
        let v = d.times(&w);
        let ok = match normalizer_split(&v) {
            Ok((d2, w2)) => {
                let rows: Vec<usize> = w.pairs().map(|(r, _)| r).collect();
                w2 == w
                    && rows.iter().all(|&r| (d2.phase(r) - d.phase(r)).norm() <= PHASE_TOLERANCE)
                    && normalizer_split(&d2.times(&w2)).is_ok_and(|again| again == (d2.clone(), w2.clone()))
            }
            Err(_) => false,
        };
        report.record(ok, || format!("k = {k}, W = {:?}", w.pairs().collect::<Vec<_>>()));
    }
    report
}

/// Conjugating phase-decorated images `d_i·w_i` of `e_{i,i+1}` by the
/// straightening unitary leaves the 0/1 partial permutations `w_i`.
pub fn straightening<R: Rng + ?Sized>(rng: &mut R, cases: usize, max_k1: usize) -> CheckReport {
    let mut report = CheckReport::new("straightening");
    for _ in 0..cases {
        let k1 = rng.gen_range(1..=max_k1);
        let theta = sample::random_embedding(rng, k1, 4);
        let dim = theta.k_to();
        let supports: Vec<Vec<usize>> = theta.diag().blocks().iter().map(|b| b.iter().map(|x| x - 1).collect()).collect();
        let images: Vec<_> = (1..k1)
            .map(|i| {
                let pairs: Vec<(usize, usize)> = theta
                    .image_of_unit(i, i + 1)
                    .expect("upper triangular unit")
                    .into_iter()
                    .map(|(r, c)| (r - 1, c - 1))
                    .collect();
                let w = PartialPermutationMatrix::from_pairs(dim, &pairs).expect("rank pairing is injective");
                (sample::random_diagonal_unitary(rng, dim), w)
            })
            .collect();
        let ok = match straighten_level(&images, &supports) {
            Ok(u) => images.iter().all(|(d, w)| {
                let straightened = conjugate_by_diagonal(&d.times(w), &u);
                straightened.max_abs_diff(&w.to_matrix()) <= PHASE_TOLERANCE
            }),
            Err(_) => false,
        };
        report.record(ok, || format!("θ = {}", theta.diag()));
    }
    report
}

/// A random alternating tower accepted by `accept`.
fn random_tower_where<R: Rng + ?Sized>(rng: &mut R, max_ratio: usize, accept: impl Fn(&TowerSpec) -> bool) -> TowerSpec {
    loop {
        let (t, _) = sample::random_tower_and_word(rng, max_ratio, 1 << 16);
        if accept(&t) {
            return t;
        }
    }
}

fn common_primes(tower: &TowerSpec) -> Vec<u64> {
    tower
        .supernatural_pair()
        .map(|(s, t)| supernatural::common_infinite_primes(&s, &t).into_iter().collect())
        .unwrap_or_default()
}

/// `θ_p ∘ φ_n = φ_{n+1} ∘ θ_p` on the normalized form of `tower`, for
/// every common prime and `n ≤ levels` where the dimensions allow.
fn shift_identity_on(report: &mut CheckReport, tower: &TowerSpec, levels: usize) {
    let Ok(normal) = tower.normalized() else {
        return;
    };
    for p in common_primes(&normal) {
        for n in 1..=levels {
            if normal.dim_small(n + 2).is_err() {
                break;
            }
            let ok = shift_commutes_with_tower(&normal, p, n).unwrap_or(false);
            report.record(ok, || format!("p = {p}, level {n}, tower {}", normal.to_string().replace('\n', "; ")));
        }
    }
}

/// Shift well-definedness on random alternating towers, levels `1..=levels`.
pub fn shift_well_definedness<R: Rng + ?Sized>(rng: &mut R, towers: usize, levels: usize) -> CheckReport {
    let mut report = CheckReport::new("shift well-definedness");
    for _ in 0..towers {
        let tower = random_tower_where(rng, 12, |t| {
            t.normalized().is_ok_and(|n| n.dim_small(levels + 2).is_ok_and(|k| k <= 1 << 21))
        });
        shift_identity_on(&mut report, &tower, levels);
    }
    report
}

fn round_trip_case(tower: &TowerSpec, w: &ShiftWord) -> Result<ShiftWord, automorphism::AutoError> {
    let m = sample::informative_level(tower);
    let first = materialize(tower, w, m, None)?;
    let second = materialize(tower, w, first.level_to, None)?;
    Ok(factor_automorphism(tower, &[first, second])?.word)
}

/// `factor(materialize(w)) = w` on random towers with step ratios up to
/// `max_ratio`.
pub fn factor_round_trip<R: Rng + ?Sized>(rng: &mut R, cases: usize, max_ratio: usize) -> CheckReport {
    let mut report = CheckReport::new("factorization round trip");
    for _ in 0..cases {
        let (tower, w) = sample::random_tower_and_word(rng, max_ratio, 1 << 18);
        let got = round_trip_case(&tower, &w);
        report.record(got.as_ref() == Ok(&w), || format!("w = {w}, got {got:?}, tower {}", tower.to_string().replace('\n', "; ")));
    }
    report
}

/// `torsion_check` is false for non-identity words and true for the
/// identity, for every power up to `max_power`.
pub fn torsion_freeness<R: Rng + ?Sized>(rng: &mut R, cases: usize, max_power: u32) -> CheckReport {
    let mut report = CheckReport::new("torsion freeness");
    let mut done = 0;
    while done < cases {
        let (tower, w) = sample::random_tower_and_word(rng, 30, 1 << 16);
        if w.is_identity() {
            continue;
        }
        done += 1;
        for m in 1..=max_power {
            let got = torsion_check(&tower, &w, m);
            report.record(got == Ok(false), || format!("w = {w}, m = {m}: {got:?}"));
            let id = torsion_check(&tower, &ShiftWord::identity(), m);
            report.record(id == Ok(true), || format!("identity, m = {m}: {id:?}"));
        }
    }
    report
}

/// Both point orders agree on every pair of points up to depth 3.
fn gelfand_agreement_on(report: &mut CheckReport, tower: &TowerSpec, max_depth: usize) {
    for depth in 1..=max_depth {
        let points = gelfand::all_points(tower, depth, "tail");
        for x in &points {
            for y in &points {
                let by_digits = gelfand::gelfand_compare(tower, x, y);
                let by_chains = gelfand::gelfand_compare_via_projections(tower, x, y);
                let ok = matches!((&by_digits, &by_chains), (Ok(a), Ok(b)) if a == b && *a != PointOrder::Incomparable);
                report.record(ok, || format!("x = {:?}, y = {:?}: {by_digits:?} vs {by_chains:?}", x.coords(), y.coords()));
            }
        }
    }
}

fn random_small_tower<R: Rng + ?Sized>(rng: &mut R, max_k3: usize) -> TowerSpec {
    loop {
        let k1 = rng.gen_range(1..=4);
        let mut text = format!("k1 {k1}\n");
        for _ in 0..rng.gen_range(1..=2) {
            let d = match rng.gen_range(0..3) {
                0 => EmbeddingDescriptor::Standard(rng.gen_range(1..=4)),
                1 => EmbeddingDescriptor::Nest(rng.gen_range(1..=4)),
                _ => EmbeddingDescriptor::Alternating {
                    s: rng.gen_range(1..=3),
                    t: rng.gen_range(1..=3),
                },
            };
            text.push_str(&format!("cycle {d}\n"));
        }
        let tower = load_tower(&text).expect("generated towers are valid");
        if tower.dim_small(3).is_ok_and(|k| k <= max_k3) {
            return tower;
        }
    }
}

/// Exhaustive agreement of the two point orders at depth ≤ 3 on `towers`
/// random alternating towers with `k_3 ≤ max_k3`.
pub fn gelfand_equivalence<R: Rng + ?Sized>(rng: &mut R, towers: usize, max_k3: usize) -> CheckReport {
    let mut report = CheckReport::new("point order agreement");
    for _ in 0..towers {
        let tower = random_small_tower(rng, max_k3);
        gelfand_agreement_on(&mut report, &tower, 3);
    }
    report
}

/// `dim T_k + dim T_k* − k = k²` for `k ≤ max_k`.
pub fn dirichlet_dimensions(max_k: usize) -> CheckReport {
    let mut report = CheckReport::new("Dirichlet dimension identity");
    for k in 1..=max_k {
        report.record(automorphism::dirichlet_dimension_check(k), || format!("k = {k}"));
    }
    report
}

/// Sweeps tied to one tower, followed by the generic sweeps.
pub fn run_all<R: Rng + ?Sized>(tower: &TowerSpec, rng: &mut R, cases: usize) -> Vec<CheckReport> {
    let mut reports = Vec::new();

    let mut r = CheckReport::new("tower text round trip");
    let text = tower.to_string();
    r.record(load_tower(&text).as_ref() == Ok(tower), || text.clone());
    reports.push(r);

    let mut r = CheckReport::new("dimension recurrence");
    for n in 2..=12 {
        let ratio = num_bigint::BigUint::from(tower.descriptor(n - 1).ratio());
        r.record(tower.dim(n) == tower.dim(n - 1) * ratio, || format!("level {n}"));
    }
    reports.push(r);

    let name = "point order agreement";
    if !tower.is_alternating_form() {
        reports.push(CheckReport::skip(name, "tower is not of alternating form"));
    } else if tower.dim_small(3).map_or(true, |k| k > 64) {
        reports.push(CheckReport::skip(name, "k_3 exceeds 64"));
    } else {
        let mut r = CheckReport::new(name);
        gelfand_agreement_on(&mut r, tower, 3);
        reports.push(r);
    }

    let primes = common_primes(tower);
    let names = ["shift well-definedness", "factorization round trip", "torsion freeness"];
    if primes.is_empty() {
        for name in names {
            reports.push(CheckReport::skip(name, "no prime divides both s_φ and t_φ infinitely"));
        }
    } else {
        let mut r = CheckReport::new(names[0]);
        shift_identity_on(&mut r, tower, 4);
        reports.push(r);

        let mut round = CheckReport::new(names[1]);
        let mut torsion = CheckReport::new(names[2]);
        for _ in 0..cases {
            let Some(w) = sample::random_word(rng, tower, 1 << 18) else {
                continue;
            };
            let got = round_trip_case(tower, &w);
            round.record(got.as_ref() == Ok(&w), || format!("w = {w}, got {got:?}"));
            let m = rng.gen_range(1..=6);
            let t = torsion_check(tower, &w, m);
            torsion.record(t == Ok(w.is_identity()), || format!("w = {w}, m = {m}: {t:?}"));
        }
        reports.push(round);
        reports.push(torsion);
    }

    reports.push(order_preservation(rng, cases, 24, 96));
    reports.push(prefix_restriction(rng, cases));
    reports.push(psize_random(rng, cases, 13, 48));
    reports.push(kronecker_agreement(rng, cases, 64));
    reports.push(normalizer_split_recovery(rng, cases, 16));
    reports.push(straightening(rng, cases, 6));
    reports.push(dirichlet_dimensions(20));
    reports
}
