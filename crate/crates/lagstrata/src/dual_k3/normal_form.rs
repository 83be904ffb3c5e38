//! A basis of V adapted to three points of S_A, and the linear system cutting out A ∩ T_ψ.

use serde_json::{json, Value};

use super::{embed, phi, psi, restrict, v0, vol5, SpecialLagrangian, SurfacePoint};
use crate::error::{Error, Result};
use crate::exterior::{MultiVector, DIM};
use crate::lagrangian::tangent_space;
use crate::linalg::{kernel, rank, solve, transpose, LinearSubspace, Matrix};
use crate::scalar::{Field, Fp, Prime};

/// v1..v5 with U_β1 = ⟨v1,v2,v3⟩, U_β2 = ⟨v1,v4,v5⟩, U_β3 = ⟨v2,v4,v3+v5⟩.
#[derive(Clone, Debug)]
pub struct AdaptedBasis {
    /// Vectors of W (last coordinate 0).
    pub vectors: [Vec<Fp>; 5],
    /// v1∧v2∧v3, v1∧v4∧v5, v2∧v4∧(v3+v5) as ∧³V coordinates.
    pub betas: [Vec<Fp>; 3],
    /// vol5(v1∧…∧v5).
    pub determinant: Fp,
}

impl AdaptedBasis {
    /// The volume form normalized so that the adapted basis has volume 1.
    pub fn volume(&self, x: &MultiVector<Fp>) -> Result<Fp> {
        let inverse = self.determinant.inv().ok_or_else(|| Error::Degenerate("adapted vectors are dependent".into()))?;
        Ok(vol5(x)? * inverse)
    }

    /// v0, v1, …, v5 as vectors of W.
    pub fn frame(&self, prime: Prime) -> Vec<Vec<Fp>> {
        let mut out = vec![v0(prime).into_coords()];
        out.extend(self.vectors.iter().cloned());
        out
    }
}

fn line(a: &LinearSubspace<Fp>, b: &LinearSubspace<Fp>) -> Result<Vec<Fp>> {
    let meet = a.intersect(b)?;
    if meet.dim() != 1 {
        return Err(Error::Degenerate(format!("U_β ∩ U_β' has dimension {}, expected 1", meet.dim())));
    }
    Ok(meet.basis()[0].clone())
}

fn wedge_vectors(prime: Prime, vectors: &[&[Fp]]) -> Result<MultiVector<Fp>> {
    let mut acc = MultiVector::scalar(prime, Fp::one(prime));
    for v in vectors {
        acc = acc.wedge(&MultiVector::vector(prime, v)?)?;
    }
    Ok(acc)
}

fn add(a: &[Fp], b: &[Fp]) -> Vec<Fp> {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

/// Whether two nonzero vectors are proportional.
pub(crate) fn proportional(a: &[Fp], b: &[Fp]) -> bool {
    rank(&[a.to_vec(), b.to_vec()], a.len()) == 1
}

pub fn adapt_basis(data: &SpecialLagrangian, points: [&SurfacePoint; 3]) -> Result<AdaptedBasis> {
    let prime = data.prime();
    let [u1, u2, u3] = points.map(SurfacePoint::subspace);
    let v1 = line(u1, u2)?;
    let v2 = line(u1, u3)?;
    let v4 = line(u2, u3)?;
    let v2v4 = LinearSubspace::span(prime, DIM, &[v2.clone(), v4.clone()])?;
    if v2v4.dim() != 2 {
        return Err(Error::Degenerate("U_β1∩U_β3 = U_β2∩U_β3".into()));
    }
    let w = u3
        .basis()
        .iter()
        .find(|b| !v2v4.contains(b))
        .cloned()
        .ok_or_else(|| Error::Degenerate("U_β3 is spanned by its meets with U_β1 and U_β2".into()))?;
    // w = a + b with a ∈ U_β1, b ∈ U_β2.
    let generators: Matrix<Fp> = u1.basis().iter().chain(u2.basis()).cloned().collect();
    let coefficients = solve(prime, &transpose(&generators, DIM), &w, generators.len())
        .ok_or_else(|| Error::Degenerate("U_β3 is not inside U_β1 + U_β2".into()))?;
    let combine = |rows: &[Vec<Fp>], c: &[Fp]| crate::linalg::vec_mat(prime, c, rows, DIM);
    let v3 = combine(u1.basis(), &coefficients[..3]);
    let v5 = combine(u2.basis(), &coefficients[3..]);

    let determinant = vol5(&wedge_vectors(prime, &[&v1, &v2, &v3, &v4, &v5])?)?;
    if determinant.is_zero() {
        return Err(Error::Degenerate("adapted vectors do not span V".into()));
    }
    let v35 = add(&v3, &v5);
    let triples: [[&[Fp]; 3]; 3] = [[&v1, &v2, &v3], [&v1, &v4, &v5], [&v2, &v4, &v35]];
    let mut betas = Vec::with_capacity(3);
    for (triple, point) in triples.iter().zip(points) {
        let beta = restrict(&wedge_vectors(prime, triple)?)?;
        if !proportional(&beta, point.beta()) {
            return Err(Error::Inconsistent("normal form does not reproduce β".into()));
        }
        betas.push(beta);
    }
    let betas: [Vec<Fp>; 3] = betas.try_into().expect("three triples");
    Ok(AdaptedBasis { vectors: [v1, v2, v3, v4, v5], betas, determinant })
}

#[derive(Clone, Debug)]
pub struct NewSystemReport {
    pub rank: usize,
    pub solution_dim: usize,
    /// vol(α_i ∧ β_j) in the adapted normalization, for (i,j) = (1,2), (1,3), (2,3).
    pub pairings: [Fp; 3],
    /// φ values equal c12·v0 + v1, c13·v0 + v2, −c23·v0 + v4 up to scale.
    pub phi_normal_form: bool,
    /// No nonzero solution has x = 0.
    pub x_nonzero: bool,
    /// The solutions map onto A ∩ T_ψ.
    pub matches_tangent_meet: bool,
}

impl NewSystemReport {
    pub fn to_json(&self) -> Value {
        json!({
            "rank": self.rank,
            "solution_dim": self.solution_dim,
            "c12_c13_c23": self.pairings.iter().map(|c| c.value()).collect::<Vec<_>>(),
            "phi_normal_form": self.phi_normal_form,
            "x_nonzero": self.x_nonzero,
            "matches_tangent_meet": self.matches_tangent_meet,
        })
    }
}

/// Unknowns (x1,x2,x3,y1,y2,y3) for ω = Σ x_i(β_i + v0∧α_i) + Σ y_j v0∧κ_j ∈ A, with the
/// conditions ω ∧ φ_a ∧ φ_b ∧ v = 0 for each pair of φ values and each adapted basis vector v.
pub fn newsystem_dimension(data: &SpecialLagrangian, points: [&SurfacePoint; 3]) -> Result<NewSystemReport> {
    let prime = data.prime();
    let basis = adapt_basis(data, points)?;
    let alphas: Vec<Vec<Fp>> = basis.betas.iter().map(|b| data.preimage(b)).collect::<Result<_>>()?;

    let pairing = |i: usize, j: usize| -> Result<Fp> {
        basis.volume(&embed(prime, 2, &alphas[i]).wedge(&embed(prime, 3, &basis.betas[j]))?)
    };
    // Lagrangian relations: vol(α_i∧β_i) = 0 and symmetry.
    for i in 0..3 {
        if !pairing(i, i)?.is_zero() {
            return Err(Error::Inconsistent("vol(α∧β) ≠ 0 on a point of S_A".into()));
        }
        for j in 0..i {
            if pairing(i, j)? != pairing(j, i)? {
                return Err(Error::Inconsistent("vol(α_i∧β_j) is not symmetric".into()));
            }
        }
    }
    let pairings = [pairing(0, 1)?, pairing(0, 2)?, pairing(1, 2)?];

    let normal_points: Vec<SurfacePoint> = basis.betas.iter().map(|b| SurfacePoint::verify(data, b)).collect::<Result<_>>()?;
    let phis = [
        phi(data, &normal_points[0], &normal_points[1])?,
        phi(data, &normal_points[0], &normal_points[2])?,
        phi(data, &normal_points[1], &normal_points[2])?,
    ];
    let v0_coords = v0(prime).into_coords();
    let expected = [
        (pairings[0], &basis.vectors[0]),
        (pairings[1], &basis.vectors[1]),
        (-pairings[2], &basis.vectors[3]),
    ];
    let phi_normal_form = phis.iter().zip(expected).all(|(phi, (c, v))| {
        let target: Vec<Fp> = v0_coords.iter().zip(v.iter()).map(|(z, x)| *z * c + *x).collect();
        proportional(phi, &target)
    });

    let mut generators: Vec<MultiVector<Fp>> = Vec::with_capacity(6);
    for (alpha, beta) in alphas.iter().zip(&basis.betas) {
        generators.push(embed(prime, 3, beta).add(&v0(prime).wedge(&embed(prime, 2, alpha))?)?);
    }
    for kappa in data.k_rows() {
        generators.push(v0(prime).wedge(&embed(prime, 2, kappa))?);
    }
    for g in &generators {
        if !data.lagrangian().contains(g) {
            return Err(Error::Inconsistent("generator of the system is not in A".into()));
        }
    }
    let frame: Vec<MultiVector<Fp>> = basis.frame(prime).iter().map(|v| MultiVector::vector(prime, v)).collect::<Result<_>>()?;
    let phi_vectors: Vec<MultiVector<Fp>> = phis.iter().map(|p| MultiVector::vector(prime, p)).collect::<Result<_>>()?;
    let mut rows: Matrix<Fp> = Vec::with_capacity(18);
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let plane = phi_vectors[a].wedge(&phi_vectors[b])?;
        for v in &frame {
            let tail = plane.wedge(v)?;
            rows.push(generators.iter().map(|g| g.wedge(&tail)?.volume()).collect::<Result<_>>()?);
        }
    }
    let unknowns = generators.len();
    let rank = rank(&rows, unknowns);
    let solutions = kernel(prime, &rows, unknowns);
    let x_part: Matrix<Fp> = solutions.iter().map(|s| s[..3].to_vec()).collect();
    let x_nonzero = rank_of(&x_part, 3) == solutions.len();

    let images: Matrix<Fp> = solutions
        .iter()
        .map(|s| {
            let mut acc = MultiVector::zero(prime, 3);
            for (c, g) in s.iter().zip(&generators) {
                acc = acc.add(&g.scale(c))?;
            }
            Ok(acc.into_coords())
        })
        .collect::<Result<_>>()?;
    let psi_space = psi(data, [&normal_points[0], &normal_points[1], &normal_points[2]])?.via_phi;
    let tangent_meet = data.lagrangian().space().intersect(tangent_space(&psi_space)?.space())?;
    let matches_tangent_meet = LinearSubspace::span(prime, 20, &images)? == tangent_meet;

    Ok(NewSystemReport { rank, solution_dim: solutions.len(), pairings, phi_normal_form, x_nonzero, matches_tangent_meet })
}

fn rank_of(rows: &Matrix<Fp>, ncols: usize) -> usize {
    if rows.is_empty() {
        0
    } else {
        rank(rows, ncols)
    }
}
