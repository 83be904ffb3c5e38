//! The affine chart of G(3,6) at U0 = ⟨e1,e2,e3⟩: U_B is the row span of [I | B].
//!
//! Over the frame (T_{U0}, T_{U∞}) every T_{U_B} is the graph of a symmetric matrix
//! whose entries are integer polynomials in the nine entries of B. Coordinates on
//! T_{U0} are x_0 = m0 (the e123 coefficient) and m_ij, the coefficient of
//! e_{U0∖{j}} ∧ e_{4+i} up to a fixed sign. In these coordinates the graph matrix is
//! −Hess of
//!
//!   q_B(m0, M) = Σ b_ij adj(M)_ij + m0 Σ adj(B)_ij m_ij + m0² det B.

use std::collections::BTreeMap;

use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::{basis_masks, DIM};
use crate::lagrangian::{is_decomposable, Lagrangian, LagrangianFrame, LAGRANGIAN_DIM};
use crate::linalg::{determinant, identity, inverse, kernel, mat_mul, rank, transpose, LinearSubspace, Matrix};
use crate::poly::{order_at_zero, Interpolator};
use crate::scalar::{same_field, Field};
use crate::strata::stratum;

/// Chart variables b_ij, flattened as 3i + j.
pub const CHART_VARS: usize = 9;

/// B, the matrix of a map U0 → U∞ in the bases (e1,e2,e3), (e4,e5,e6).
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint<F: Field> {
    entries: Matrix<F>,
}

impl<F: Field> ChartPoint<F> {
    pub fn new(entries: Matrix<F>) -> Result<Self> {
        if entries.len() != 3 || entries.iter().any(|r| r.len() != 3) {
            return Err(Error::DimensionMismatch("chart point must be 3×3".into()));
        }
        Ok(ChartPoint { entries })
    }

    pub fn zero(ctx: F::Ctx) -> Self {
        ChartPoint { entries: vec![vec![F::zero(ctx); 3]; 3] }
    }

    pub fn identity(ctx: F::Ctx) -> Self {
        ChartPoint { entries: identity(ctx, 3) }
    }

    pub fn random<R: Rng + ?Sized>(ctx: F::Ctx, rng: &mut R) -> Self {
        ChartPoint { entries: (0..3).map(|_| (0..3).map(|_| F::random(ctx, rng)).collect()).collect() }
    }

    pub fn entries(&self) -> &Matrix<F> {
        &self.entries
    }

    pub fn flat(&self) -> Vec<F> {
        self.entries.iter().flatten().cloned().collect()
    }

    pub fn from_flat(values: &[F]) -> Result<Self> {
        if values.len() != CHART_VARS {
            return Err(Error::DimensionMismatch(format!("{} chart coordinates", values.len())));
        }
        ChartPoint::new(values.chunks(3).map(<[F]>::to_vec).collect())
    }

    /// t·B.
    pub fn scaled(&self, t: &F) -> Self {
        ChartPoint { entries: self.entries.iter().map(|r| r.iter().map(|x| x.clone() * t.clone()).collect()).collect() }
    }
}

/// U_B = row span of [I | B].
pub fn chart_subspace<F: Field>(ctx: F::Ctx, point: &ChartPoint<F>) -> LinearSubspace<F> {
    let rows: Matrix<F> = (0..3)
        .map(|i| {
            let mut row = vec![F::zero(ctx); DIM];
            row[i] = F::one(ctx);
            row[3..].clone_from_slice(&point.entries[i]);
            row
        })
        .collect();
    LinearSubspace::span(ctx, DIM, &rows).expect("three rows of length six")
}

/// B with U = U_B, when U is transverse to U∞.
pub fn chart_coordinates<F: Field>(u: &LinearSubspace<F>) -> Result<ChartPoint<F>> {
    if u.ambient() != DIM || u.dim() != 3 {
        return Err(Error::DimensionMismatch("need a 3-dimensional subspace of F^6".into()));
    }
    let square: Matrix<F> = u.basis().iter().map(|r| r[..3].to_vec()).collect();
    if inverse(u.ctx(), &square).is_none() {
        return Err(Error::NotTransverse);
    }
    // The echelon basis of a transverse U is already [I | B].
    ChartPoint::new(u.basis().iter().map(|r| r[3..].to_vec()).collect())
}

/// An integer polynomial in the chart variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChartPoly {
    terms: BTreeMap<[u8; CHART_VARS], i64>,
}

impl ChartPoly {
    pub fn constant(c: i64) -> Self {
        let mut p = ChartPoly::default();
        p.add_term([0; CHART_VARS], c);
        p
    }

    pub fn variable(index: usize) -> Self {
        let mut exps = [0; CHART_VARS];
        exps[index] = 1;
        let mut p = ChartPoly::default();
        p.add_term(exps, 1);
        p
    }

    fn add_term(&mut self, exps: [u8; CHART_VARS], c: i64) {
        let slot = self.terms.entry(exps).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.terms.remove(&exps);
        }
    }

    pub fn add(&self, other: &ChartPoly) -> ChartPoly {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(*e, c);
        }
        out
    }

    pub fn scale(&self, factor: i64) -> ChartPoly {
        let mut out = ChartPoly::default();
        for (e, &c) in &self.terms {
            out.add_term(*e, c * factor);
        }
        out
    }

    pub fn mul(&self, other: &ChartPoly) -> ChartPoly {
        let mut out = ChartPoly::default();
        for (e1, &c1) in &self.terms {
            for (e2, &c2) in &other.terms {
                let mut e = *e1;
                for (x, y) in e.iter_mut().zip(e2) {
                    *x += y;
                }
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| e.iter().map(|&x| x as usize).sum()).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8; CHART_VARS], i64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn evaluate<F: Field>(&self, ctx: F::Ctx, values: &[F]) -> F {
        let mut acc = F::zero(ctx);
        for (e, &c) in &self.terms {
            let mut term = F::from_i64(ctx, c);
            for (v, &k) in values.iter().zip(e) {
                for _ in 0..k {
                    term = term * v.clone();
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Homogeneous part of the given degree evaluated at `values`.
    pub fn evaluate_part<F: Field>(&self, ctx: F::Ctx, values: &[F], part: usize) -> F {
        let mut restricted = ChartPoly::default();
        for (e, &c) in &self.terms {
            if e.iter().map(|&x| x as usize).sum::<usize>() == part {
                restricted.add_term(*e, c);
            }
        }
        restricted.evaluate(ctx, values)
    }
}

/// Positions of T_{U0} basis vectors among the x coordinates, keyed by mask.
fn tangent_position(mask: u8) -> usize {
    tangent_masks().iter().position(|&m| m == mask).expect("mask of T_U0")
}

/// The ten masks with at least two labels in {1,2,3}, in lexicographic order.
pub fn tangent_masks() -> Vec<u8> {
    basis_masks(3).iter().copied().filter(|m| (m & 0b111).count_ones() >= 2).collect()
}

/// (sign, x index) with m_ij = sign · x_index.
fn matrix_coordinate(i: usize, j: usize) -> (i64, usize) {
    const COLUMN_SIGNS: [i64; 3] = [-1, 1, -1];
    let mask = (0b111u8 & !(1 << j)) | (1 << (3 + i));
    (COLUMN_SIGNS[j], tangent_position(mask))
}

/// (−1)^{a+b} times the 2×2 minor of a 3×3 array deleting row b and column a.
fn cofactor<T: Clone>(a: usize, b: usize, entry: impl Fn(usize, usize) -> T, det2: impl Fn(T, T, T, T) -> T) -> (i64, T) {
    let rows: Vec<usize> = (0..3).filter(|&r| r != b).collect();
    let cols: Vec<usize> = (0..3).filter(|&c| c != a).collect();
    let value = det2(entry(rows[0], cols[0]), entry(rows[1], cols[1]), entry(rows[0], cols[1]), entry(rows[1], cols[0]));
    (if (a + b) % 2 == 0 { 1 } else { -1 }, value)
}

/// The chart quadric with symbolic entries; G(B) is the graph matrix of T_{U_B}.
#[derive(Clone, Debug)]
pub struct SymbolicQuadric {
    entries: Vec<Vec<ChartPoly>>,
}

impl SymbolicQuadric {
    pub fn build() -> Self {
        let n = LAGRANGIAN_DIM;
        // coefficients[a][b], a ≤ b: coefficient of x_a x_b in q_B.
        let mut coefficients = vec![vec![ChartPoly::default(); n]; n];
        let mut add = |a: usize, b: usize, poly: ChartPoly| {
            let (lo, hi) = (a.min(b), a.max(b));
            coefficients[lo][hi] = coefficients[lo][hi].add(&poly);
        };
        let var = |i: usize, j: usize| ChartPoly::variable(3 * i + j);

        // Σ b_ij adj(M)_ij
        for i in 0..3 {
            for j in 0..3 {
                let rows: Vec<usize> = (0..3).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..3).filter(|&c| c != i).collect();
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                for (r1, c1, r2, c2, s) in [
                    (rows[0], cols[0], rows[1], cols[1], sign),
                    (rows[0], cols[1], rows[1], cols[0], -sign),
                ] {
                    let (s1, x1) = matrix_coordinate(r1, c1);
                    let (s2, x2) = matrix_coordinate(r2, c2);
                    add(x1, x2, var(i, j).scale(s * s1 * s2));
                }
            }
        }
        // m0 Σ adj(B)_ij m_ij
        for i in 0..3 {
            for j in 0..3 {
                let (sign, minor) = cofactor(i, j, |r, c| var(r, c), |a, d, b, c| a.mul(&d).add(&b.mul(&c).scale(-1)));
                let (s, x) = matrix_coordinate(i, j);
                add(0, x, minor.scale(sign * s));
            }
        }
        // m0² det B
        let mut det = ChartPoly::default();
        for (sigma, sign) in [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([1, 0, 2], -1), ([0, 2, 1], -1), ([2, 1, 0], -1)] {
            det = det.add(&var(0, sigma[0]).mul(&var(1, sigma[1])).mul(&var(2, sigma[2])).scale(sign));
        }
        add(0, 0, det);

        let entries = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let c = &coefficients[a.min(b)][a.max(b)];
                        if a == b {
                            c.scale(-2)
                        } else {
                            c.scale(-1)
                        }
                    })
                    .collect()
            })
            .collect();
        SymbolicQuadric { entries }
    }

    pub fn entry(&self, a: usize, b: usize) -> &ChartPoly {
        &self.entries[a][b]
    }

    pub fn evaluate<F: Field>(&self, ctx: F::Ctx, point: &ChartPoint<F>) -> Matrix<F> {
        let values = point.flat();
        self.entries.iter().map(|row| row.iter().map(|p| p.evaluate(ctx, &values)).collect()).collect()
    }

    /// The degree-`part` homogeneous piece evaluated at B.
    pub fn evaluate_part<F: Field>(&self, ctx: F::Ctx, point: &ChartPoint<F>, part: usize) -> Matrix<F> {
        let values = point.flat();
        self.entries.iter().map(|row| row.iter().map(|p| p.evaluate_part(ctx, &values, part)).collect()).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.entries.iter().flatten().filter_map(ChartPoly::total_degree).max().unwrap_or(0)
    }
}

/// Chart quadric at a point B: the graph matrix of T_{U_B} over the canonical frame.
pub fn chart_quadric<F: Field>(ctx: F::Ctx, point: &ChartPoint<F>) -> Matrix<F> {
    SymbolicQuadric::build().evaluate(ctx, point)
}

/// The quadratic form q_B itself as an upper-triangular coefficient table (for display).
pub fn chart_quadric_json<F: Field>(ctx: F::Ctx, point: &ChartPoint<F>) -> Value {
    let m = chart_quadric(ctx, point);
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(Field::to_json).collect())).collect())
}

/// Q_A: the graph matrix of A over the canonical frame.
pub fn graph_matrix<F: Field>(a: &Lagrangian<F>) -> Result<Matrix<F>> {
    crate::lagrangian::graph_of(&LagrangianFrame::canonical(a.ctx()), a)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            if n - i < k - current.len() {
                break;
            }
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn minor<F: Field>(ctx: F::Ctx, m: &[Vec<F>], rows: &[usize], cols: &[usize]) -> F {
    let sub: Matrix<F> = rows.iter().map(|&r| cols.iter().map(|&c| m[r][c].clone()).collect()).collect();
    determinant(ctx, &sub)
}

/// Generators of the ideal of D_ℓ^A near U0: the (11−ℓ)-minors of G(B) − Q_A.
///
/// The minors are kept as determinants of the symbolic matrix and expanded only along
/// lines, where each becomes a univariate polynomial of degree at most s + 2 for size s.
#[derive(Clone, Debug)]
pub struct LocalEquations<F: Field> {
    ctx: F::Ctx,
    level: usize,
    symbolic: SymbolicQuadric,
    graph: Matrix<F>,
    /// Row/column index sets with rows ≤ columns; the matrix is symmetric.
    minors: Vec<(Vec<usize>, Vec<usize>)>,
}

impl<F: Field> LocalEquations<F> {
    pub fn new(a: &Lagrangian<F>, level: usize) -> Result<Self> {
        if !(1..=4).contains(&level) {
            return Err(Error::OutOfRange(format!("level ℓ = {level} outside 1..=4")));
        }
        let graph = graph_matrix(a)?;
        let size = LAGRANGIAN_DIM + 1 - level;
        let sets = subsets(LAGRANGIAN_DIM, size);
        let mut minors = Vec::new();
        for (i, rows) in sets.iter().enumerate() {
            for cols in &sets[i..] {
                minors.push((rows.clone(), cols.clone()));
            }
        }
        Ok(LocalEquations { ctx: a.ctx(), level, symbolic: SymbolicQuadric::build(), graph, minors })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn minor_size(&self) -> usize {
        LAGRANGIAN_DIM + 1 - self.level
    }

    pub fn generator_count(&self) -> usize {
        self.minors.len()
    }

    /// Upper bound on the degree of every generator along any line.
    pub fn degree_bound(&self) -> usize {
        self.minor_size() + 2
    }

    fn difference_at(&self, point: &ChartPoint<F>) -> Matrix<F> {
        let g = self.symbolic.evaluate(self.ctx, point);
        g.iter().zip(&self.graph).map(|(r, q)| r.iter().zip(q).map(|(x, y)| x.clone() - y.clone()).collect()).collect()
    }

    /// All generators evaluated at B.
    pub fn evaluate(&self, point: &ChartPoint<F>) -> Vec<F> {
        let m = self.difference_at(point);
        self.minors.iter().map(|(r, c)| minor(self.ctx, &m, r, c)).collect()
    }

    pub fn vanish_at(&self, point: &ChartPoint<F>) -> bool {
        let m = self.difference_at(point);
        // Equivalent to rank(G − Q_A) ≤ 10 − ℓ, and much cheaper than every minor.
        rank(&m, LAGRANGIAN_DIM) <= LAGRANGIAN_DIM - self.level
    }

    /// Each generator restricted to B = base + t·direction, as coefficient vectors in t.
    pub fn restrict_to_line(&self, base: &ChartPoint<F>, direction: &ChartPoint<F>) -> Result<Vec<Vec<F>>> {
        let interp = Interpolator::consecutive(self.ctx, self.degree_bound() + 1)?;
        let samples: Vec<Matrix<F>> = interp
            .nodes()
            .iter()
            .map(|t: &F| {
                let shifted: Vec<F> =
                    base.flat().iter().zip(direction.flat()).map(|(b, d)| b.clone() + d * t.clone()).collect::<Vec<F>>();
                self.difference_at(&ChartPoint::from_flat(&shifted).expect("nine entries"))
            })
            .collect();
        Ok(self
            .minors
            .iter()
            .map(|(r, c)| {
                let values: Vec<F> = samples.iter().map(|m| minor(self.ctx, m, r, c)).collect();
                interp.coefficients(&values)
            })
            .collect())
    }
}

/// Minimal order at t = 0 of the (11−ℓ)-minors of G(tD) − Q_A.
pub fn vanishing_order<F: Field>(
    a: &Lagrangian<F>,
    level: usize,
    direction: &ChartPoint<F>,
    max_order: usize,
) -> Result<usize> {
    let equations = LocalEquations::new(a, level)?;
    let polys = equations.restrict_to_line(&ChartPoint::zero(a.ctx()), direction)?;
    let order = polys.iter().filter_map(|p| order_at_zero(p)).min();
    match order {
        Some(o) if o <= max_order => Ok(o),
        _ => Err(Error::Degenerate(format!(
            "vanishing order along the direction exceeds {max_order} (degenerate direction)"
        ))),
    }
}

/// Number of extra directions tried when a random one is not generic.
pub const DIRECTION_RETRIES: usize = 3;

/// Vanishing order along a random direction, redrawing while it exceeds `expected`.
pub fn generic_vanishing_order<F: Field, R: Rng + ?Sized>(
    a: &Lagrangian<F>,
    level: usize,
    expected: usize,
    rng: &mut R,
) -> Result<(usize, ChartPoint<F>)> {
    let equations = LocalEquations::new(a, level)?;
    let ctx = a.ctx();
    for _ in 0..=DIRECTION_RETRIES {
        let direction = ChartPoint::random(ctx, rng);
        let polys = equations.restrict_to_line(&ChartPoint::zero(ctx), &direction)?;
        if let Some(order) = polys.iter().filter_map(|p| order_at_zero(p)).min() {
            if order <= expected {
                return Ok((order, direction));
            }
        }
    }
    Err(Error::RetriesExhausted(DIRECTION_RETRIES + 1))
}

/// Rank of B ↦ (linear part of G(B)) as a map from the 9-dimensional chart.
pub fn linear_part_rank<F: Field>(ctx: F::Ctx) -> usize {
    let symbolic = SymbolicQuadric::build();
    let rows: Matrix<F> = (0..CHART_VARS)
        .map(|v| {
            let mut flat = vec![F::zero(ctx); CHART_VARS];
            flat[v] = F::one(ctx);
            let point = ChartPoint::from_flat(&flat).expect("nine entries");
            symbolic.evaluate_part(ctx, &point, 1).into_iter().flatten().collect()
        })
        .collect();
    rank(&rows, LAGRANGIAN_DIM * LAGRANGIAN_DIM)
}

/// K = A ∩ T_{U0} in T_{U0} coordinates.
pub fn kernel_in_chart<F: Field>(a: &Lagrangian<F>) -> Result<Matrix<F>> {
    let q = graph_matrix(a)?;
    Ok(kernel(a.ctx(), &q, LAGRANGIAN_DIM))
}

/// Searches ℙ(K) for a decomposable trivector: exhaustively over F_p when K has
/// dimension at most 3, and on `samples` random points otherwise.
pub fn decomposable_in_kernel<F: Field, R: Rng + ?Sized>(
    frame: &LagrangianFrame<F>,
    kernel_rows: &[Vec<F>],
    samples: usize,
    rng: &mut R,
) -> Result<Option<Vec<F>>> {
    let ctx = frame.ctx();
    let k = kernel_rows.len();
    let check = |coeffs: &[F]| -> Result<Option<Vec<F>>> {
        let x = crate::linalg::vec_mat(ctx, coeffs, kernel_rows, LAGRANGIAN_DIM);
        let omega = crate::exterior::MultiVector::from_coords(ctx, 3, frame.point_of_l0(&x))?;
        if omega.is_zero() {
            return Ok(None);
        }
        Ok(is_decomposable(&omega)?.map(|_| omega.into_coords()))
    };
    let p = F::characteristic(ctx);
    if k == 0 {
        return Ok(None);
    }
    if p != 0 && k <= 3 {
        for lead in 0..k {
            let free = k - 1 - lead;
            for mut index in 0..(p as u64).pow(free as u32) {
                let mut coeffs = vec![F::zero(ctx); k];
                coeffs[lead] = F::one(ctx);
                for slot in coeffs.iter_mut().skip(lead + 1) {
                    *slot = F::from_i64(ctx, (index % p as u64) as i64);
                    index /= p as u64;
                }
                if let Some(w) = check(&coeffs)? {
                    return Ok(Some(w));
                }
            }
        }
        return Ok(None);
    }
    for i in 0..k {
        let mut coeffs = vec![F::zero(ctx); k];
        coeffs[i] = F::one(ctx);
        if let Some(w) = check(&coeffs)? {
            return Ok(Some(w));
        }
    }
    for _ in 0..samples {
        let coeffs: Vec<F> = (0..k).map(|_| F::random(ctx, rng)).collect();
        if let Some(w) = check(&coeffs)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Rank of B ↦ (linear part of G(B)) restricted to K = A ∩ T_{U0}, as a map to
/// quadratic forms on K.
pub fn kernel_restriction_rank<F: Field, R: Rng + ?Sized>(a: &Lagrangian<F>, rng: &mut R) -> Result<usize> {
    let ctx = a.ctx();
    let frame = LagrangianFrame::canonical(ctx);
    same_field::<F>(ctx, frame.ctx())?;
    let k_rows = kernel_in_chart(a)?;
    let k = k_rows.len();
    if k > 3 {
        return Err(Error::Precondition(format!("dim A∩T_U0 = {k} exceeds 3")));
    }
    if let Some(witness) = decomposable_in_kernel(&frame, &k_rows, 200, rng)? {
        let shown: Vec<String> = witness.iter().map(|x| x.to_string()).collect();
        return Err(Error::Precondition(format!("ℙ(A∩T_U0) meets G(3,6) at [{}]", shown.join(", "))));
    }
    if k == 0 {
        return Ok(0);
    }
    let symbolic = SymbolicQuadric::build();
    let k_cols = transpose(&k_rows, LAGRANGIAN_DIM);
    let rows: Matrix<F> = (0..CHART_VARS)
        .map(|v| {
            let mut flat = vec![F::zero(ctx); CHART_VARS];
            flat[v] = F::one(ctx);
            let linear = symbolic.evaluate_part(ctx, &ChartPoint::from_flat(&flat).expect("nine entries"), 1);
            let restricted = mat_mul(ctx, &mat_mul(ctx, &k_rows, &linear, LAGRANGIAN_DIM), &k_cols, k);
            let mut upper = Vec::with_capacity(k * (k + 1) / 2);
            for i in 0..k {
                for j in i..k {
                    upper.push(restricted[i][j].clone());
                }
            }
            upper
        })
        .collect();
    Ok(rank(&rows, k * (k + 1) / 2))
}

/// A graph Lagrangian whose intersection with T_{U0} has dimension exactly `corank`:
/// Q = Pᵀ D P with D = diag(0,…,0, d_{corank+1},…,d_10), every d_i nonzero, P invertible.
pub fn planted_lagrangian<F: Field, R: Rng + ?Sized>(ctx: F::Ctx, corank: usize, rng: &mut R) -> Result<Lagrangian<F>> {
    if corank > LAGRANGIAN_DIM {
        return Err(Error::OutOfRange(format!("corank {corank}")));
    }
    let n = LAGRANGIAN_DIM;
    let p = loop {
        let m: Matrix<F> = (0..n).map(|_| (0..n).map(|_| F::random(ctx, rng)).collect()).collect();
        if rank(&m, n) == n {
            break m;
        }
    };
    let mut d = vec![vec![F::zero(ctx); n]; n];
    for (i, row) in d.iter_mut().enumerate().skip(corank) {
        row[i] = loop {
            let x = F::random(ctx, rng);
            if !x.is_zero() {
                break x;
            }
        };
    }
    let q = mat_mul(ctx, &mat_mul(ctx, &transpose(&p, n), &d, n), &p, n);
    crate::lagrangian::lagrangian_from_graph(&LagrangianFrame::canonical(ctx), &q)
}

/// Like [`planted_lagrangian`], redrawn until ℙ(A ∩ T_{U0}) avoids G(3,6).
pub fn planted_decomposable_free<F: Field, R: Rng + ?Sized>(
    ctx: F::Ctx,
    corank: usize,
    rng: &mut R,
    attempts: usize,
) -> Result<Lagrangian<F>> {
    let frame = LagrangianFrame::canonical(ctx);
    for _ in 0..attempts {
        let a = planted_lagrangian(ctx, corank, rng)?;
        let k_rows = kernel_in_chart(&a)?;
        if decomposable_in_kernel(&frame, &k_rows, 200, rng)?.is_none() {
            return Ok(a);
        }
    }
    Err(Error::RetriesExhausted(attempts))
}

/// Consistency of the local equations with pointwise strata: true when
/// "all minors vanish at B" agrees with stratum(A, U_B) ≥ ℓ.
pub fn equations_agree_with_stratum<F: Field>(equations: &LocalEquations<F>, a: &Lagrangian<F>, point: &ChartPoint<F>) -> Result<bool> {
    let by_minors = equations.evaluate(point).iter().all(Field::is_zero);
    let by_stratum = stratum(a, &chart_subspace(a.ctx(), point))? >= equations.level();
    Ok(by_minors == by_stratum)
}

pub fn order_record(k: usize, level: usize, order: usize) -> Value {
    json!({"k": k, "l": level, "order": order})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::{graph_of, tangent_space};
    use crate::scalar::{Fp, Prime, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p101() -> Prime {
        Prime::new(101).unwrap()
    }

    fn direct_graph<F: Field>(ctx: F::Ctx, point: &ChartPoint<F>) -> Matrix<F> {
        let frame = LagrangianFrame::canonical(ctx);
        graph_of(&frame, &tangent_space(&chart_subspace(ctx, point)).unwrap()).unwrap()
    }

    #[test]
    fn chart_subspace_examples() {
        assert_eq!(chart_subspace((), &ChartPoint::<Rational>::zero(())), crate::lagrangian::coordinate_subspace((), &[1, 2, 3]));
        let u = chart_subspace((), &ChartPoint::<Rational>::identity(()));
        let one = Rational::new(1, 1);
        let zero = Rational::new(0, 1);
        for i in 0..3 {
            let mut v = vec![zero.clone(); 6];
            v[i] = one.clone();
            v[i + 3] = one.clone();
            assert!(u.contains(&v));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let b = ChartPoint::<Fp>::random(p101(), &mut rng);
            assert_eq!(chart_coordinates(&chart_subspace(p101(), &b)).unwrap(), b);
        }
        let uinf = crate::lagrangian::coordinate_subspace::<Fp>(p101(), &[4, 5, 6]);
        assert_eq!(chart_coordinates(&uinf).unwrap_err(), Error::NotTransverse);
    }

    #[test]
    fn tangent_masks_follow_the_zero_basis() {
        let frame = LagrangianFrame::<Rational>::canonical(());
        for (row, mask) in frame.zero_basis().iter().zip(tangent_masks()) {
            assert!(row[crate::exterior::mask_index(mask)].is_one());
        }
    }

    #[test]
    fn chart_quadric_at_origin_and_identity() {
        assert!(chart_quadric((), &ChartPoint::<Rational>::zero(())).iter().flatten().all(Field::is_zero));
        let at_identity = chart_quadric((), &ChartPoint::<Rational>::identity(()));
        assert_eq!(at_identity, direct_graph((), &ChartPoint::identity(())));
        assert_eq!(at_identity[0][0], Rational::new(-2, 1));
    }

    #[test]
    fn chart_quadric_matches_tangent_space_graph() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let symbolic = SymbolicQuadric::build();
        for _ in 0..25 {
            let b = ChartPoint::<Rational>::random((), &mut rng);
            assert_eq!(symbolic.evaluate((), &b), direct_graph((), &b));
            let b = ChartPoint::<Fp>::random(p101(), &mut rng);
            assert_eq!(symbolic.evaluate(p101(), &b), direct_graph(p101(), &b));
        }
    }

    #[test]
    fn entry_degrees_match_the_formula() {
        let symbolic = SymbolicQuadric::build();
        assert_eq!(symbolic.max_degree(), 3);
        assert_eq!(symbolic.entry(0, 0).total_degree(), Some(3));
        for a in 1..10 {
            assert_eq!(symbolic.entry(0, a).total_degree(), Some(2));
            for b in 1..10 {
                assert!(symbolic.entry(a, b).total_degree().map_or(true, |d| d == 1));
            }
        }
    }

    #[test]
    fn linear_part_is_injective() {
        assert_eq!(linear_part_rank::<Rational>(()), 9);
        assert_eq!(linear_part_rank::<Fp>(p101()), 9);
    }

    #[test]
    fn local_equations_agree_with_strata() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let field = p101();
        for trial in 0..50 {
            let level = 1 + trial % 2;
            // Half the points are planted on the stratum: A = T_{U_B}-adjacent graphs.
            let b = ChartPoint::<Fp>::random(field, &mut rng);
            let a = if trial % 4 < 2 {
                crate::lagrangian::random_graph_lagrangian(&LagrangianFrame::canonical(field), &mut rng)
            } else {
                let g = chart_quadric(field, &b);
                let k = planted_kernel_shift(field, &g, level, &mut rng);
                crate::lagrangian::lagrangian_from_graph(&LagrangianFrame::canonical(field), &k).unwrap()
            };
            let eqs = LocalEquations::new(&a, level).unwrap();
            assert!(equations_agree_with_stratum(&eqs, &a, &b).unwrap());
            let by_rank = eqs.vanish_at(&b);
            let by_stratum = stratum(&a, &chart_subspace(field, &b)).unwrap() >= level;
            assert_eq!(by_rank, by_stratum);
        }
    }

    /// Q = G(B) − (symmetric matrix of rank 10 − corank), so dim(A ∩ T_{U_B}) = corank.
    fn planted_kernel_shift(field: Prime, g: &Matrix<Fp>, corank: usize, rng: &mut ChaCha8Rng) -> Matrix<Fp> {
        let n = LAGRANGIAN_DIM;
        let p: Matrix<Fp> = loop {
            let m: Matrix<Fp> = (0..n).map(|_| (0..n).map(|_| Fp::random(field, rng)).collect()).collect();
            if rank(&m, n) == n {
                break m;
            }
        };
        let mut d = vec![vec![field.element(0); n]; n];
        for (i, row) in d.iter_mut().enumerate().skip(corank) {
            row[i] = field.element(1 + i as i64);
        }
        let s = mat_mul(field, &mat_mul(field, &transpose(&p, n), &d, n), &p, n);
        g.iter().zip(&s).map(|(r, t)| r.iter().zip(t).map(|(x, y)| *x - *y).collect()).collect()
    }

    #[test]
    fn level_one_equation_is_a_single_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let field = p101();
        let a = planted_lagrangian::<Fp, _>(field, 0, &mut rng).unwrap();
        let eqs = LocalEquations::new(&a, 1).unwrap();
        assert_eq!(eqs.generator_count(), 1);
        assert!(!eqs.evaluate(&ChartPoint::zero(field))[0].is_zero());
        let a = planted_lagrangian::<Fp, _>(field, 1, &mut rng).unwrap();
        let eqs = LocalEquations::new(&a, 1).unwrap();
        assert!(eqs.evaluate(&ChartPoint::zero(field))[0].is_zero());
        let a = planted_lagrangian::<Fp, _>(field, 2, &mut rng).unwrap();
        let eqs = LocalEquations::new(&a, 2).unwrap();
        assert!(eqs.evaluate(&ChartPoint::zero(field)).iter().all(Field::is_zero));
    }

    #[test]
    fn planted_corank_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let field = p101();
        for k in 0..=4 {
            let a = planted_lagrangian::<Fp, _>(field, k, &mut rng).unwrap();
            let u0 = crate::lagrangian::coordinate_subspace(field, &[1, 2, 3]);
            assert_eq!(stratum(&a, &u0).unwrap(), k);
            assert_eq!(kernel_in_chart(&a).unwrap().len(), k);
        }
    }

    #[test]
    fn tangent_cone_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let field = p101();
        for k in 2..=3 {
            let a = planted_decomposable_free::<Fp, _>(field, k, &mut rng, 20).unwrap();
            for level in 1..=k {
                let (order, direction) = generic_vanishing_order(&a, level, k - level + 1, &mut rng).unwrap();
                assert_eq!(order, k - level + 1, "k={k} ℓ={level}");
                assert_eq!(vanishing_order(&a, level, &direction, 10).unwrap(), order);
            }
        }
    }

    #[test]
    fn degenerate_direction_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let field = p101();
        let a = planted_lagrangian::<Fp, _>(field, 2, &mut rng).unwrap();
        // The zero direction keeps every minor at its value at the origin, which vanishes.
        assert!(matches!(vanishing_order(&a, 2, &ChartPoint::zero(field), 5), Err(Error::Degenerate(_))));
    }

    #[test]
    fn restriction_ranks() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let field = p101();
        for (k, expected) in [(0, 0), (1, 1), (2, 3), (3, 6)] {
            let a = planted_decomposable_free::<Fp, _>(field, k, &mut rng, 20).unwrap();
            assert_eq!(kernel_restriction_rank(&a, &mut rng).unwrap(), expected);
        }
        let a = planted_lagrangian::<Fp, _>(field, 4, &mut rng).unwrap();
        assert!(matches!(kernel_restriction_rank(&a, &mut rng), Err(Error::Precondition(_))));
    }

    #[test]
    fn decomposable_kernel_is_rejected_with_witness() {
        let field = p101();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // Q with kernel ⟨x_0⟩: e123 ∈ A ∩ T_U0 is decomposable.
        let n = LAGRANGIAN_DIM;
        let mut q = vec![vec![field.element(0); n]; n];
        for (i, row) in q.iter_mut().enumerate().skip(1) {
            row[i] = field.element(i as i64);
        }
        let a = crate::lagrangian::lagrangian_from_graph(&LagrangianFrame::canonical(field), &q).unwrap();
        let err = kernel_restriction_rank(&a, &mut rng).unwrap_err();
        assert!(matches!(err, Error::Precondition(ref msg) if msg.contains("meets G(3,6)")), "{err}");
    }

    #[test]
    fn level_one_equation_has_degree_twelve_along_generic_lines() {
        // Oracle: the naive bound 3·10 on a 10×10 determinant of cubic entries, so 31 nodes.
        let field = p101();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let wide = Interpolator::<Fp>::consecutive(field, 31).unwrap();
        for _ in 0..5 {
            let a = crate::lagrangian::random_graph_lagrangian(&LagrangianFrame::<Fp>::canonical(field), &mut rng);
            let eqs = LocalEquations::new(&a, 1).unwrap();
            let base = ChartPoint::random(field, &mut rng);
            let direction = ChartPoint::random(field, &mut rng);
            let values: Vec<Fp> = wide
                .nodes()
                .iter()
                .map(|t| {
                    let flat: Vec<Fp> = base.flat().iter().zip(direction.flat()).map(|(b, d)| *b + d * *t).collect();
                    eqs.evaluate(&ChartPoint::from_flat(&flat).unwrap())[0]
                })
                .collect();
            let coeffs = wide.coefficients(&values);
            assert_eq!(crate::poly::degree(&coeffs), Some(12));
            let narrow = eqs.restrict_to_line(&base, &direction).unwrap();
            assert_eq!(&narrow[0][..], &coeffs[..13]);
        }
    }
}
