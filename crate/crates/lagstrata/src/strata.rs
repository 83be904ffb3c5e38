//! Degeneracy strata D_k^A = {[U] : dim A∩T_U ≥ k}: pointwise evaluation, an exhaustive
//! census of G(3, F_p⁶), and witness searches for the divisors Σ, Δ and Γ.
//!
//! The census never builds T_U. Writing f_a(x,y,z) = vol(a∧x∧y∧z) for a basis a of A,
//! dim(A∩T_U) = 10 − rank of the 10×18 matrix f_a(u_i, u_j, e_k). The (u1,u2) block is
//! reduced once per pair of echelon rows and only the residual rows are ranked per u3.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exterior::{basis_masks, elements, eta_coords, MultiVector, TriVector, DIM};
use crate::lagrangian::{
    is_decomposable, random_graph_lagrangian, tangent_space, Lagrangian, LagrangianFrame, LAGRANGIAN_DIM,
};
use crate::linalg::{vec_mat, LinearSubspace, Matrix};
use crate::scalar::{Field, Fp, Prime};

/// dim(A ∩ T_U).
pub fn stratum<F: Field>(a: &Lagrangian<F>, u: &LinearSubspace<F>) -> Result<usize> {
    a.meet_dim(&tangent_space(u)?)
}

/// Number of k-dimensional subspaces of F_q^n.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut numer = 1u128;
    let mut denom = 1u128;
    for i in 0..k {
        numer *= q.pow(n - i) - 1;
        denom *= q.pow(i + 1) - 1;
    }
    numer / denom
}

/// Largest enumeration the census accepts by default: all of G(3, F_7⁶).
pub const DEFAULT_BUDGET: u128 = 48_177_200;
/// Witnesses kept verbatim per probe; the full count is always reported.
pub const WITNESS_CAP: usize = 4096;
pub const DELTA_MAX_PRIME: u32 = 13;
pub const GAMMA_MAX_PRIME: u32 = 7;
pub const EXHAUSTIVE_SIGMA_MAX_PRIME: u32 = 3;

#[derive(Clone, Debug)]
pub struct CensusReport {
    pub prime: u32,
    /// counts[k] = #{[U] : dim A∩T_U = k}.
    pub counts: [u64; 11],
    pub total: u64,
    pub elapsed: Duration,
    /// Points [U] with ∧³U ∈ A.
    pub sigma_count: u64,
    pub sigma_witnesses: Vec<LinearSubspace<Fp>>,
    /// Points [U] with dim A∩T_U ≥ 4.
    pub gamma_count: u64,
    pub gamma_witnesses: Vec<LinearSubspace<Fp>>,
}

impl CensusReport {
    /// cumulative[k] = #{[U] : dim A∩T_U ≥ k}.
    pub fn cumulative(&self) -> [u64; 11] {
        let mut out = [0u64; 11];
        let mut running = 0;
        for k in (0..11).rev() {
            running += self.counts[k];
            out[k] = running;
        }
        out
    }

    pub fn count_at_least(&self, k: usize) -> u64 {
        self.cumulative().get(k).copied().unwrap_or(0)
    }

    pub fn to_json(&self) -> Value {
        let as_map = |values: &[u64; 11]| -> Value {
            let mut m = Map::new();
            for (k, &n) in values.iter().enumerate() {
                if n > 0 {
                    m.insert(k.to_string(), Value::from(n));
                }
            }
            Value::Object(m)
        };
        json!({
            "prime": self.prime,
            "total": self.total,
            "counts": as_map(&self.counts),
            "cumulative": as_map(&self.cumulative()),
            "sigma_count": self.sigma_count,
            "gamma_count": self.gamma_count,
            "elapsed_ms": self.elapsed.as_millis() as u64,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    FoundWitness,
    NoneFound,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness<F: Field> {
    /// A point [w] of ℙ(W).
    Point(Vec<F>),
    /// A point [U] of G(3, W).
    Subspace(LinearSubspace<F>),
    /// A decomposable ω ∈ A together with its U.
    Decomposable(TriVector<F>, LinearSubspace<F>),
}

impl<F: Field> Witness<F> {
    pub fn to_json(&self) -> Value {
        let rows = |m: &Matrix<F>| -> Value {
            Value::Array(m.iter().map(|r| Value::Array(r.iter().map(Field::to_json).collect())).collect())
        };
        match self {
            Witness::Point(w) => json!({"point": w.iter().map(Field::to_json).collect::<Vec<_>>()}),
            Witness::Subspace(u) => json!({"subspace": rows(u.basis())}),
            Witness::Decomposable(omega, u) => json!({
                "trivector": omega.coords().iter().map(Field::to_json).collect::<Vec<_>>(),
                "subspace": rows(u.basis()),
            }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DivisorProbeResult<F: Field> {
    pub verdict: Verdict,
    /// At most [`WITNESS_CAP`] witnesses, in enumeration order.
    pub witnesses: Vec<Witness<F>>,
    pub witness_count: u64,
    /// Points examined.
    pub searched: u64,
    /// True when the search covered every point, so `NoneFound` is a certificate.
    pub exhaustive: bool,
}

impl<F: Field> DivisorProbeResult<F> {
    fn from_witnesses(witnesses: Vec<Witness<F>>, witness_count: u64, searched: u64, exhaustive: bool) -> Self {
        let verdict = if witness_count > 0 { Verdict::FoundWitness } else { Verdict::NoneFound };
        DivisorProbeResult { verdict, witnesses, witness_count, searched, exhaustive }
    }

    pub fn found(&self) -> bool {
        self.verdict == Verdict::FoundWitness
    }

    /// True only for an exhaustive search that found nothing.
    pub fn certifies_absence(&self) -> bool {
        self.exhaustive && !self.found()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "verdict": match self.verdict { Verdict::FoundWitness => "found-witness", Verdict::NoneFound => "none-found" },
            "kind": if self.exhaustive { "exhaustive" } else { "sampled" },
            "witness_count": self.witness_count,
            "searched": self.searched,
            "witnesses": self.witnesses.iter().take(8).map(Witness::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Residue arithmetic on raw u32 values for the enumeration loops.
struct Residues {
    p: u32,
    inverses: Vec<u32>,
}

impl Residues {
    fn new(p: u32) -> Self {
        let field = Prime::new(p).expect("validated prime");
        let inverses = (0..p).map(|v| field.element(v as i64).inv().map_or(0, Fp::value)).collect();
        Residues { p, inverses }
    }

    /// Rank of a small matrix, destroying it.
    fn rank(&self, rows: &mut [[u32; 15]], nrows: usize, ncols: usize) -> usize {
        let p = self.p as u64;
        let mut r = 0;
        for col in 0..ncols {
            let Some(pivot) = (r..nrows).find(|&i| rows[i][col] != 0) else { continue };
            rows.swap(r, pivot);
            let inv = self.inverses[rows[r][col] as usize] as u64;
            for c in col..ncols {
                rows[r][c] = (rows[r][c] as u64 * inv % p) as u32;
            }
            for i in r + 1..nrows {
                let factor = rows[i][col] as u64;
                if factor == 0 {
                    continue;
                }
                for c in col..ncols {
                    rows[i][c] = ((rows[i][c] as u64 + (p - factor) * rows[r][c] as u64) % p) as u32;
                }
            }
            r += 1;
            if r == nrows {
                break;
            }
        }
        r
    }
}

/// The trilinear forms f_a(e_i, e_j, e_k) for a basis of A, flattened as i·36 + j·6 + k.
fn trilinear_forms(a: &Lagrangian<Fp>) -> Vec<[u32; 216]> {
    let ctx = a.ctx();
    a.basis()
        .iter()
        .map(|row| {
            let mut form = [0u32; 216];
            for &mask in basis_masks(3) {
                let value = eta_coords(row, MultiVector::<Fp>::basis(ctx, &labels_of(mask)).coords()).value();
                if value == 0 {
                    continue;
                }
                let idx = elements(mask);
                for perm in PERMUTATIONS_3 {
                    let (i, j, k) = (idx[perm.0], idx[perm.1], idx[perm.2]);
                    form[i * 36 + j * 6 + k] = if perm.3 > 0 { value } else { ctx.get() - value };
                }
            }
            form
        })
        .collect()
}

const PERMUTATIONS_3: [(usize, usize, usize, i8); 6] =
    [(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1), (1, 0, 2, -1), (0, 2, 1, -1), (2, 1, 0, -1)];

fn labels_of(mask: u8) -> Vec<usize> {
    elements(mask).into_iter().map(|i| i + 1).collect()
}

/// Echelon rows of one Schubert cell: pivots c1 < c2 < c3, free entries to the right of each
/// pivot outside the pivot columns.
struct Cell {
    pivots: [usize; 3],
    free: [Vec<usize>; 3],
}

impl Cell {
    fn all() -> Vec<Cell> {
        let mut cells = Vec::new();
        for c1 in 0..DIM {
            for c2 in c1 + 1..DIM {
                for c3 in c2 + 1..DIM {
                    let pivots = [c1, c2, c3];
                    let free = pivots.map(|c| (c + 1..DIM).filter(|col| !pivots.contains(col)).collect());
                    cells.push(Cell { pivots, free });
                }
            }
        }
        cells
    }

    fn row_count(&self, row: usize, p: u32) -> u64 {
        (p as u64).pow(self.free[row].len() as u32)
    }

    fn row(&self, row: usize, mut index: u64, p: u32) -> [u32; 6] {
        let mut v = [0u32; 6];
        v[self.pivots[row]] = 1;
        for &col in &self.free[row] {
            v[col] = (index % p as u64) as u32;
            index /= p as u64;
        }
        v
    }
}

#[derive(Default)]
struct ScanChunk {
    counts: [u64; 11],
    sigma_count: u64,
    sigma: Vec<[[u32; 6]; 3]>,
    gamma_count: u64,
    gamma: Vec<[[u32; 6]; 3]>,
}

impl ScanChunk {
    fn merge(mut self, other: ScanChunk) -> ScanChunk {
        for k in 0..11 {
            self.counts[k] += other.counts[k];
        }
        self.sigma_count += other.sigma_count;
        self.gamma_count += other.gamma_count;
        for w in other.sigma {
            if self.sigma.len() < WITNESS_CAP {
                self.sigma.push(w);
            }
        }
        for w in other.gamma {
            if self.gamma.len() < WITNESS_CAP {
                self.gamma.push(w);
            }
        }
        self
    }
}

/// 2-form ι_u f_a as a 6×6 antisymmetric array.
fn contract_form(res: &Residues, form: &[u32; 216], u: &[u32; 6]) -> [u32; 36] {
    let p = res.p as u64;
    let mut out = [0u32; 36];
    for jk in 0..36 {
        let mut acc = 0u64;
        for i in 0..DIM {
            if u[i] != 0 {
                acc += u[i] as u64 * form[i * 36 + jk] as u64;
            }
        }
        out[jk] = (acc % p) as u32;
    }
    out
}

fn scan_first_row(res: &Residues, forms: &[[u32; 216]], cell: &Cell, u1: [u32; 6]) -> ScanChunk {
    let p = res.p as u64;
    let mut chunk = ScanChunk::default();
    let g1: Vec<[u32; 36]> = forms.iter().map(|f| contract_form(res, f, &u1)).collect();
    for i2 in 0..cell.row_count(1, res.p) {
        let u2 = cell.row(1, i2, res.p);
        let g2: Vec<[u32; 36]> = forms.iter().map(|f| contract_form(res, f, &u2)).collect();
        // Augmented [h12 | I]: h12[a][k] = f_a(u1, u2, e_k).
        let mut aug = [[0u32; 16]; LAGRANGIAN_DIM];
        for a in 0..LAGRANGIAN_DIM {
            for k in 0..DIM {
                let mut acc = 0u64;
                for j in 0..DIM {
                    acc += u2[j] as u64 * g1[a][j * 6 + k] as u64;
                }
                aug[a][k] = (acc % p) as u32;
            }
            aug[a][6 + a] = 1;
        }
        let mut top = 0;
        for col in 0..DIM {
            let Some(pivot) = (top..LAGRANGIAN_DIM).find(|&i| aug[i][col] != 0) else { continue };
            aug.swap(top, pivot);
            let inv = res.inverses[aug[top][col] as usize] as u64;
            for c in 0..16 {
                aug[top][c] = (aug[top][c] as u64 * inv % p) as u32;
            }
            for i in 0..LAGRANGIAN_DIM {
                let factor = aug[i][col] as u64;
                if i == top || factor == 0 {
                    continue;
                }
                for c in 0..16 {
                    aug[i][c] = ((aug[i][c] as u64 + (p - factor) * aug[top][c] as u64) % p) as u32;
                }
            }
            top += 1;
        }
        let residual = LAGRANGIAN_DIM - top;
        // Combined 2-forms for the rows of the reduced block that vanish on (u1, u2, ·).
        let combine = |forms2: &[[u32; 36]], coeffs: &[u32]| -> [u32; 36] {
            let mut out = [0u32; 36];
            for jk in 0..36 {
                let mut acc = 0u64;
                for a in 0..LAGRANGIAN_DIM {
                    acc += coeffs[a] as u64 * forms2[a][jk] as u64;
                }
                out[jk] = (acc % p) as u32;
            }
            out
        };
        let residual_forms: Vec<([u32; 36], [u32; 36])> =
            (top..LAGRANGIAN_DIM).map(|r| (combine(&g1, &aug[r][6..]), combine(&g2, &aug[r][6..]))).collect();

        for i3 in 0..cell.row_count(2, res.p) {
            let u3 = cell.row(2, i3, res.p);
            // ∧³U ∈ A iff every f_a(u1,u2,u3) vanishes, i.e. the reduced h12 rows kill u3.
            let in_a = (0..top).all(|r| (0..DIM).map(|k| aug[r][k] as u64 * u3[k] as u64).sum::<u64>() % p == 0);
            let mut block = [[0u32; 15]; LAGRANGIAN_DIM];
            for (r, (f1, f2)) in residual_forms.iter().enumerate() {
                for k in 0..DIM {
                    let mut acc1 = 0u64;
                    let mut acc2 = 0u64;
                    for j in 0..DIM {
                        if u3[j] != 0 {
                            acc1 += u3[j] as u64 * f1[j * 6 + k] as u64;
                            acc2 += u3[j] as u64 * f2[j * 6 + k] as u64;
                        }
                    }
                    block[r][k] = (acc1 % p) as u32;
                    block[r][6 + k] = (acc2 % p) as u32;
                }
            }
            let dim = residual - res.rank(&mut block, residual, 12);
            chunk.counts[dim] += 1;
            if in_a {
                chunk.sigma_count += 1;
                if chunk.sigma.len() < WITNESS_CAP {
                    chunk.sigma.push([u1, u2, u3]);
                }
            }
            if dim >= 4 {
                chunk.gamma_count += 1;
                if chunk.gamma.len() < WITNESS_CAP {
                    chunk.gamma.push([u1, u2, u3]);
                }
            }
        }
    }
    chunk
}

fn subspace_of_rows(field: Prime, rows: &[[u32; 6]; 3]) -> LinearSubspace<Fp> {
    let vectors: Matrix<Fp> = rows.iter().map(|r| r.iter().map(|&x| field.element(x as i64)).collect()).collect();
    LinearSubspace::span(field, DIM, &vectors).expect("echelon rows")
}

/// Exact counts of dim(A∩T_U) over all of G(3, F_p⁶).
pub fn census(a: &Lagrangian<Fp>) -> Result<CensusReport> {
    census_with_budget(a, DEFAULT_BUDGET)
}

pub fn census_with_budget(a: &Lagrangian<Fp>, budget: u128) -> Result<CensusReport> {
    let field = a.ctx();
    let p = field.get();
    let total = gaussian_binomial(6, 3, p as u64);
    if total > budget {
        return Err(Error::BudgetExceeded(format!("G(3,6) over F_{p} has {total} points, budget {budget}")));
    }
    let start = Instant::now();
    let res = Residues::new(p);
    let forms = trilinear_forms(a);
    let cells = Cell::all();
    let jobs: Vec<(usize, u64)> =
        cells.iter().enumerate().flat_map(|(c, cell)| (0..cell.row_count(0, p)).map(move |i| (c, i))).collect();
    let merged = jobs
        .par_iter()
        .map(|&(c, i)| scan_first_row(&res, &forms, &cells[c], cells[c].row(0, i, p)))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(ScanChunk::default(), ScanChunk::merge);
    let counted: u64 = merged.counts.iter().sum();
    if counted as u128 != total {
        return Err(Error::Inconsistent(format!("enumerated {counted} subspaces, expected {total}")));
    }
    Ok(CensusReport {
        prime: p,
        counts: merged.counts,
        total: counted,
        elapsed: start.elapsed(),
        sigma_count: merged.sigma_count,
        sigma_witnesses: merged.sigma.iter().map(|r| subspace_of_rows(field, r)).collect(),
        gamma_count: merged.gamma_count,
        gamma_witnesses: merged.gamma.iter().map(|r| subspace_of_rows(field, r)).collect(),
    })
}

/// Exhaustive search for [U] with dim A∩T_U ≥ 4.
pub fn gamma_witnesses(a: &Lagrangian<Fp>) -> Result<DivisorProbeResult<Fp>> {
    let p = a.ctx().get();
    if p > GAMMA_MAX_PRIME {
        return Err(Error::BudgetExceeded(format!("Γ scan needs p ≤ {GAMMA_MAX_PRIME}, got {p}")));
    }
    Ok(gamma_from_census(&census(a)?))
}

pub fn gamma_from_census(report: &CensusReport) -> DivisorProbeResult<Fp> {
    DivisorProbeResult::from_witnesses(
        report.gamma_witnesses.iter().cloned().map(Witness::Subspace).collect(),
        report.gamma_count,
        report.total,
        true,
    )
}

/// Σ certificate read off a census: every decomposable class in ℙ(A) is ∧³U for some [U].
pub fn sigma_from_census(report: &CensusReport) -> Result<DivisorProbeResult<Fp>> {
    let witnesses = report
        .sigma_witnesses
        .iter()
        .map(|u| Ok(Witness::Decomposable(crate::lagrangian::plucker(u)?, u.clone())))
        .collect::<Result<_>>()?;
    Ok(DivisorProbeResult::from_witnesses(witnesses, report.sigma_count, report.total, true))
}

/// Normalized representatives of ℙ^{n−1}(F_p): first nonzero coordinate equal to 1.
fn projective_points(p: u32, n: usize) -> impl Iterator<Item = Vec<u32>> {
    (0..n).flat_map(move |lead| {
        let free = n - 1 - lead;
        (0..(p as u64).pow(free as u32)).map(move |mut index| {
            let mut v = vec![0u32; n];
            v[lead] = 1;
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = (index % p as u64) as u32;
                index /= p as u64;
            }
            v
        })
    })
}

/// Exhaustive list of [w] ∈ ℙ(W) with dim A∩F_[w] ≥ 3.
pub fn delta_witnesses(a: &Lagrangian<Fp>) -> Result<DivisorProbeResult<Fp>> {
    let field = a.ctx();
    let p = field.get();
    if p > DELTA_MAX_PRIME {
        return Err(Error::BudgetExceeded(format!("Δ scan needs p ≤ {DELTA_MAX_PRIME}, got {p}")));
    }
    let res = Residues::new(p);
    let forms = trilinear_forms(a);
    let pairs = basis_masks(2);
    let points: Vec<Vec<u32>> = projective_points(p, DIM).collect();
    let hits: Vec<Vec<u32>> = points
        .par_iter()
        .filter(|w| {
            let mut block = [[0u32; 15]; LAGRANGIAN_DIM];
            let w6: [u32; 6] = [w[0], w[1], w[2], w[3], w[4], w[5]];
            for (a_idx, form) in forms.iter().enumerate() {
                let g = contract_form(&res, form, &w6);
                for (col, &mask) in pairs.iter().enumerate() {
                    let idx = elements(mask);
                    block[a_idx][col] = g[idx[0] * 6 + idx[1]];
                }
            }
            LAGRANGIAN_DIM - res.rank(&mut block, LAGRANGIAN_DIM, 15) >= 3
        })
        .cloned()
        .collect();
    let count = hits.len() as u64;
    let witnesses = hits
        .into_iter()
        .take(WITNESS_CAP)
        .map(|w| Witness::Point(w.iter().map(|&x| field.element(x as i64)).collect()))
        .collect();
    Ok(DivisorProbeResult::from_witnesses(witnesses, count, points.len() as u64, true))
}

/// Searches ℙ(A) for decomposable classes: random elements, plus every point when the
/// field is F_2 or F_3.
pub fn sigma_probe<F: Field, R: Rng + ?Sized>(
    a: &Lagrangian<F>,
    trials: usize,
    rng: &mut R,
) -> Result<DivisorProbeResult<F>> {
    if trials == 0 {
        return Err(Error::OutOfRange("sigma_probe needs at least one trial".into()));
    }
    let ctx = a.ctx();
    let mut witnesses = Vec::new();
    let mut count = 0u64;
    let mut searched = 0u64;
    let mut test = |coeffs: &[F], witnesses: &mut Vec<Witness<F>>| -> Result<()> {
        let omega = TriVector::from_coords(ctx, 3, vec_mat(ctx, coeffs, a.basis(), 20))?;
        if omega.is_zero() {
            return Ok(());
        }
        if let Some(u) = is_decomposable(&omega)? {
            count += 1;
            if witnesses.len() < WITNESS_CAP {
                witnesses.push(Witness::Decomposable(omega, u));
            }
        }
        Ok(())
    };
    let characteristic = F::characteristic(ctx);
    let exhaustive = characteristic != 0 && characteristic <= EXHAUSTIVE_SIGMA_MAX_PRIME;
    if exhaustive {
        for point in projective_points(characteristic, LAGRANGIAN_DIM) {
            let coeffs: Vec<F> = point.iter().map(|&x| F::from_i64(ctx, x as i64)).collect();
            test(&coeffs, &mut witnesses)?;
            searched += 1;
        }
    } else {
        for _ in 0..trials {
            let coeffs: Vec<F> = (0..LAGRANGIAN_DIM).map(|_| F::random(ctx, rng)).collect();
            test(&coeffs, &mut witnesses)?;
            searched += 1;
        }
        // The echelon basis itself often carries planted witnesses.
        for i in 0..LAGRANGIAN_DIM {
            let mut coeffs = vec![F::zero(ctx); LAGRANGIAN_DIM];
            coeffs[i] = F::one(ctx);
            test(&coeffs, &mut witnesses)?;
            searched += 1;
        }
    }
    Ok(DivisorProbeResult::from_witnesses(witnesses, count, searched, exhaustive))
}

/// Outcome of screening a Lagrangian for membership in Σ ∪ Γ over F_p.
#[derive(Clone, Debug)]
pub struct Lg1Screen {
    pub census: CensusReport,
    pub sigma: DivisorProbeResult<Fp>,
    pub gamma: DivisorProbeResult<Fp>,
}

impl Lg1Screen {
    pub fn accepted(&self) -> bool {
        self.sigma.certifies_absence() && self.gamma.certifies_absence()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "accepted": self.accepted(),
            "census": self.census.to_json(),
            "sigma": self.sigma.to_json(),
            "gamma": self.gamma.to_json(),
        })
    }
}

/// One exhaustive scan of G(3, F_p⁶) certifies both Σ and Γ (non-)membership.
pub fn screen_lg1(a: &Lagrangian<Fp>) -> Result<Lg1Screen> {
    let p = a.ctx().get();
    if p > GAMMA_MAX_PRIME {
        return Err(Error::BudgetExceeded(format!("LG¹ screening needs p ≤ {GAMMA_MAX_PRIME}, got {p}")));
    }
    let census = census(a)?;
    let sigma = sigma_from_census(&census)?;
    let gamma = gamma_from_census(&census);
    Ok(Lg1Screen { census, sigma, gamma })
}

#[derive(Clone, Debug)]
pub struct Lg1Sample {
    pub lagrangian: Lagrangian<Fp>,
    pub screen: Lg1Screen,
    pub attempts: usize,
}

/// Rejection-samples graph Lagrangians over the canonical frame until one is certified
/// outside Σ ∪ Γ.
pub fn sample_lg1(p: Prime, seed: u64, max_attempts: usize) -> Result<Lg1Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_lg1_with(p, &mut rng, max_attempts)
}

pub fn sample_lg1_with<R: Rng + ?Sized>(p: Prime, rng: &mut R, max_attempts: usize) -> Result<Lg1Sample> {
    if p.get() > GAMMA_MAX_PRIME {
        return Err(Error::BudgetExceeded(format!("LG¹ sampling needs p ≤ {GAMMA_MAX_PRIME}, got {}", p.get())));
    }
    let frame = LagrangianFrame::<Fp>::canonical(p);
    for attempt in 1..=max_attempts {
        let a = random_graph_lagrangian(&frame, rng);
        let screen = screen_lg1(&a)?;
        if screen.accepted() {
            return Ok(Lg1Sample { lagrangian: a, screen, attempts: attempt });
        }
    }
    Err(Error::RetriesExhausted(max_attempts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::{coordinate_subspace, f_space, lagrangian_from_graph, random_subspace};
    use crate::scalar::Rational;

    fn prime(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(6, 3, 2), 1395);
        assert_eq!(gaussian_binomial(6, 3, 3), 33880);
        assert_eq!(gaussian_binomial(6, 3, 5), 2_558_556);
        assert_eq!(gaussian_binomial(6, 3, 7), DEFAULT_BUDGET);
        assert_eq!(gaussian_binomial(6, 1, 5), 3906);
    }

    #[test]
    fn stratum_examples() {
        let u0 = coordinate_subspace::<Rational>((), &[1, 2, 3]);
        let t0 = tangent_space(&u0).unwrap();
        assert_eq!(stratum(&t0, &u0).unwrap(), 10);
        let f1 = f_space::<Rational>((), &[Rational::new(1, 1), Rational::new(0, 1), Rational::new(0, 1), Rational::new(0, 1), Rational::new(0, 1), Rational::new(0, 1)]).unwrap();
        assert_eq!(stratum(&f1, &u0).unwrap(), 7);
        assert_eq!(stratum(&f1, &coordinate_subspace((), &[2, 3, 4])).unwrap(), 3);
    }

    #[test]
    fn random_graph_lagrangians_rarely_meet_tangent_spaces() {
        let field = prime(101);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let frame = LagrangianFrame::<Fp>::canonical(field);
        let zeros = (0..100)
            .filter(|_| {
                let a = random_graph_lagrangian(&frame, &mut rng);
                let u = random_subspace(field, 6, 3, &mut rng);
                stratum(&a, &u).unwrap() == 0
            })
            .count();
        assert!(zeros >= 95, "{zeros}");
    }

    #[test]
    fn census_of_tangent_space_matches_pointwise_strata() {
        let field = prime(2);
        let t0 = tangent_space(&coordinate_subspace::<Fp>(field, &[1, 2, 3])).unwrap();
        let report = census(&t0).unwrap();
        assert_eq!(report.total, 1395);
        assert_eq!(report.counts[10], 1);
        // Oracle: generic stratum on every echelon representative.
        let mut expected = [0u64; 11];
        for cell in Cell::all() {
            for i1 in 0..cell.row_count(0, 2) {
                for i2 in 0..cell.row_count(1, 2) {
                    for i3 in 0..cell.row_count(2, 2) {
                        let rows = [cell.row(0, i1, 2), cell.row(1, i2, 2), cell.row(2, i3, 2)];
                        expected[stratum(&t0, &subspace_of_rows(field, &rows)).unwrap()] += 1;
                    }
                }
            }
        }
        assert_eq!(report.counts, expected);
    }

    #[test]
    fn census_agrees_with_pointwise_strata_for_random_lagrangian() {
        let field = prime(3);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_graph_lagrangian(&LagrangianFrame::canonical(field), &mut rng);
        let report = census(&a).unwrap();
        assert_eq!(report.total, 33880);
        let mut expected = [0u64; 11];
        let mut sigma = 0;
        for cell in Cell::all() {
            for i1 in 0..cell.row_count(0, 3) {
                for i2 in 0..cell.row_count(1, 3) {
                    for i3 in 0..cell.row_count(2, 3) {
                        let rows = [cell.row(0, i1, 3), cell.row(1, i2, 3), cell.row(2, i3, 3)];
                        let u = subspace_of_rows(field, &rows);
                        expected[stratum(&a, &u).unwrap()] += 1;
                        if a.contains(&crate::lagrangian::plucker(&u).unwrap()) {
                            sigma += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(report.counts, expected);
        assert_eq!(report.sigma_count, sigma);
    }

    #[test]
    fn census_budget_is_enforced() {
        let field = prime(11);
        let t0 = tangent_space(&coordinate_subspace::<Fp>(field, &[1, 2, 3])).unwrap();
        assert!(matches!(census(&t0), Err(Error::BudgetExceeded(_))));
        assert!(matches!(census_with_budget(&tangent_space(&coordinate_subspace::<Fp>(prime(2), &[1, 2, 3])).unwrap(), 10), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn gamma_examples() {
        let field = prime(3);
        let u0 = coordinate_subspace::<Fp>(field, &[1, 2, 3]);
        let result = gamma_witnesses(&tangent_space(&u0).unwrap()).unwrap();
        assert!(result.found());
        assert!(result.witnesses.contains(&Witness::Subspace(u0)));

        let mut e1 = vec![field.element(0); 6];
        e1[0] = field.element(1);
        let f = f_space(field, &e1).unwrap();
        let result = gamma_witnesses(&f).unwrap();
        // Every U through e1: [5 choose 2]_3 of them, each with dim 7.
        assert_eq!(result.witness_count, gaussian_binomial(5, 2, 3) as u64);
        for w in &result.witnesses {
            let Witness::Subspace(u) = w else { panic!() };
            assert!(u.contains(&e1));
            assert_eq!(stratum(&f, u).unwrap(), 7);
        }
    }

    #[test]
    fn delta_examples() {
        let field = prime(5);
        let u0 = coordinate_subspace::<Fp>(field, &[1, 2, 3]);
        let t0 = tangent_space(&u0).unwrap();
        let result = delta_witnesses(&t0).unwrap();
        // dim T_U0 ∩ F_[w] is 7 on ℙ(U0) and 3 elsewhere, so every point qualifies.
        assert_eq!(result.witness_count, 3906);
        let inside = result
            .witnesses
            .iter()
            .filter(|w| matches!(w, Witness::Point(w) if u0.contains(w)))
            .inspect(|w| {
                let Witness::Point(w) = w else { unreachable!() };
                assert_eq!(t0.meet_dim(&f_space(field, w).unwrap()).unwrap(), 7);
            })
            .count();
        assert_eq!(inside, 31);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let frame = LagrangianFrame::canonical(field);
        let none = (0..5).filter(|_| !delta_witnesses(&random_graph_lagrangian(&frame, &mut rng)).unwrap().found()).count();
        assert!(none >= 3, "{none}");
    }

    #[test]
    fn sigma_probe_finds_planted_witnesses() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t0 = tangent_space(&coordinate_subspace::<Rational>((), &[1, 2, 3])).unwrap();
        let result = sigma_probe(&t0, 10, &mut rng).unwrap();
        assert!(result.found());
        assert!(!result.exhaustive);

        let field = prime(2);
        let frame = LagrangianFrame::<Fp>::canonical(field);
        let mut m = crate::lagrangian::random_symmetric(field, 10, &mut rng);
        for i in 0..10 {
            m[0][i] = field.element(0);
            m[i][0] = field.element(0);
        }
        let planted = lagrangian_from_graph(&frame, &m).unwrap();
        let result = sigma_probe(&planted, 1, &mut rng).unwrap();
        assert!(result.exhaustive);
        assert_eq!(result.searched, 1023);
        let e123 = crate::lagrangian::basis_trivector(field, [1, 2, 3]);
        assert!(result.witnesses.iter().any(|w| matches!(w, Witness::Decomposable(omega, _) if *omega == e123)));
    }

    #[test]
    fn exhaustive_sigma_probe_agrees_with_census() {
        let field = prime(3);
        let frame = LagrangianFrame::<Fp>::canonical(field);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..3 {
            let a = random_graph_lagrangian(&frame, &mut rng);
            let report = census(&a).unwrap();
            let probe = sigma_probe(&a, 1, &mut rng).unwrap();
            // Each [U] with ∧³U ∈ A is one point of ℙ(A).
            assert_eq!(probe.witness_count, report.sigma_count);
        }
    }

    #[test]
    fn screening_rejects_planted_sigma_point() {
        let field = prime(3);
        let frame = LagrangianFrame::<Fp>::canonical(field);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut m = crate::lagrangian::random_symmetric(field, 10, &mut rng);
        for i in 0..10 {
            m[0][i] = field.element(0);
            m[i][0] = field.element(0);
        }
        let screen = screen_lg1(&lagrangian_from_graph(&frame, &m).unwrap()).unwrap();
        assert!(screen.sigma.found());
        assert!(!screen.accepted());
    }

    #[test]
    fn sample_lg1_certifies_and_is_deterministic() {
        let field = prime(3);
        let sample = sample_lg1(field, 1, 50).unwrap();
        assert!(sample.screen.accepted());
        assert_eq!(sample.screen.census.count_at_least(4), 0);
        assert_eq!(sample.screen.census.sigma_count, 0);
        let again = sample_lg1(field, 1, 50).unwrap();
        assert_eq!(again.lagrangian, sample.lagrangian);
        assert_eq!(again.screen.census.counts, sample.screen.census.counts);
        assert_eq!(sample_lg1(field, 1, 0).unwrap_err(), Error::RetriesExhausted(0));
        assert!(matches!(sample_lg1(prime(11), 1, 5), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn small_field_sampling_either_certifies_or_exhausts() {
        match sample_lg1(prime(2), 9, 3) {
            Ok(sample) => assert!(sample.screen.accepted()),
            Err(e) => assert_eq!(e, Error::RetriesExhausted(3)),
        }
    }

    #[test]
    fn stratum_is_invariant_under_change_of_basis() {
        let field = prime(101);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let frame = LagrangianFrame::<Fp>::canonical(field);
        for trial in 0..30 {
            // Alternate generic pairs with planted positive strata.
            let a = if trial % 2 == 0 {
                random_graph_lagrangian(&frame, &mut rng)
            } else {
                tangent_space(&random_subspace(field, 6, 3, &mut rng)).unwrap()
            };
            let u = random_subspace(field, 6, 3, &mut rng);
            let g = mat_random_invertible(field, &mut rng);
            let before = stratum(&a, &u).unwrap();
            let (a2, u2) = crate::lagrangian::transform_pair(&g, &a, &u).unwrap();
            assert_eq!(stratum(&a2, &u2).unwrap(), before);
            // A different basis of the same U gives the same answer.
            let mixed = crate::linalg::mat_mul(field, &mat_random_invertible_n(field, 3, &mut rng), u.basis(), 6);
            assert_eq!(stratum(&a, &LinearSubspace::span(field, 6, &mixed).unwrap()).unwrap(), before);
        }
    }

    fn mat_random_invertible(field: Prime, rng: &mut ChaCha8Rng) -> Matrix<Fp> {
        mat_random_invertible_n(field, 6, rng)
    }

    fn mat_random_invertible_n(field: Prime, n: usize, rng: &mut ChaCha8Rng) -> Matrix<Fp> {
        loop {
            let m: Matrix<Fp> = (0..n).map(|_| (0..n).map(|_| Fp::random(field, rng)).collect()).collect();
            if crate::linalg::rank(&m, n) == n {
                return m;
            }
        }
    }

    #[test]
    fn census_is_deterministic_and_consistent() {
        let field = prime(3);
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let a = random_graph_lagrangian(&LagrangianFrame::canonical(field), &mut rng);
        let first = census(&a).unwrap();
        let second = census(&a).unwrap();
        assert_eq!(first.counts, second.counts);
        assert_eq!(first.sigma_witnesses, second.sigma_witnesses);
        assert_eq!(first.cumulative()[0], first.total);
        let sum: u64 = first.counts.iter().sum();
        assert_eq!(sum, 33880);
    }

    #[test]
    fn witness_rows_are_verified() {
        // Every reported witness satisfies its defining inequality exactly.
        let field = prime(3);
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let frame = LagrangianFrame::<Fp>::canonical(field);
        for _ in 0..4 {
            let a = random_graph_lagrangian(&frame, &mut rng);
            let report = census(&a).unwrap();
            for u in &report.gamma_witnesses {
                assert!(stratum(&a, u).unwrap() >= 4);
            }
            for u in &report.sigma_witnesses {
                assert!(a.contains(&crate::lagrangian::plucker(u).unwrap()));
            }
            for w in delta_witnesses(&a).unwrap().witnesses {
                let Witness::Point(w) = w else { panic!() };
                assert!(a.meet_dim(&f_space(field, &w).unwrap()).unwrap() >= 3);
            }
        }
    }
}
