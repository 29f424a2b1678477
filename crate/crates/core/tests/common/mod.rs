#![allow(dead_code)]

use matcube::linalg::{
    hermitian_basis, outer, partial_trace_first, pauli, random_hermitian, random_unit_vector, ComplexMatrix,
    HermitianMatrix, RandomStream,
};
use matcube::sdp::{feasibility, Feasibility, SdpProblem, Settings, SymBlockMatrix};
use matcube::steering::{Assemblage, SteeringInequality};

pub fn herm(m: ComplexMatrix) -> HermitianMatrix {
    HermitianMatrix::new(m).unwrap()
}

pub fn sharp(m: &ComplexMatrix) -> HermitianMatrix {
    herm(&ComplexMatrix::identity(m.rows()) + m).scale(0.5)
}

/// min t s.t. S = tI − embed(H) ⪰ 0, with S in block 0 and the free
/// variable t = t₊ − t₋ split over the 1×1 blocks 1 and 2.
pub fn lambda_max_problem(h: &HermitianMatrix) -> SdpProblem {
    let e = h.real_embedding();
    let n = e.nrows();
    let mut obj = SymBlockMatrix::new();
    obj.add(1, 0, 0, 1.0);
    obj.add(2, 0, 0, -1.0);
    let mut cons = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut a = SymBlockMatrix::new();
            a.add(0, i, j, if i == j { 1.0 } else { 0.5 });
            if i == j {
                a.add(1, 0, 0, -1.0);
                a.add(2, 0, 0, 1.0);
            }
            cons.push(a);
            rhs.push(-e[(i, j)]);
        }
    }
    SdpProblem::new(vec![n, 1, 1], obj, cons, rhs).unwrap()
}

/// Bloch-vector qubit measurement `(I ± η n·σ)/2`.
fn qubit_effect(n: [f64; 3], eta: f64) -> HermitianMatrix {
    let [x, y, z] = pauli();
    let m = &(&x.scale_real(n[0]) + &y.scale_real(n[1])) + &z.scale_real(n[2]);
    herm(&ComplexMatrix::identity(2) + &m.scale_real(eta)).scale(0.5)
}

fn unit3(rng: &mut RandomStream) -> [f64; 3] {
    let v = [rng.normal(), rng.normal(), rng.normal()];
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|x| x / n)
}

/// σ_{a|x} = Tr_A[(M_{a|x} ⊗ I) ρ_AB] for a random pure two-qubit state under
/// white noise, measured with random unsharp qubit measurements.
pub fn random_physical_assemblage(g: usize, rng: &mut RandomStream) -> Assemblage {
    let psi = random_unit_vector(4, rng);
    let p = 0.7 + 0.3 * rng.uniform();
    let rho = &herm(outer(&psi, &psi)).scale(p) + &HermitianMatrix::identity(4).scale((1.0 - p) / 4.0);
    let eta = 0.6 + 0.4 * rng.uniform();
    let id = ComplexMatrix::identity(2);
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for _ in 0..g {
        let e = qubit_effect(unit3(rng), eta);
        let f = herm(&id - e.matrix());
        for (m, out) in [(e, &mut plus), (f, &mut minus)] {
            let k = m.matrix().kron(&id).unwrap().matmul(rho.matrix()).unwrap();
            out.push(herm(partial_trace_first(&k, 2, 2).unwrap()));
        }
    }
    Assemblage::new(plus, minus).unwrap()
}

/// Direct LHS feasibility: σ_λ ⪰ 0 for λ ∈ {±}^g with
/// Σ_λ σ_λ = σ̄ and Σ_{λ_x = +} σ_λ = σ_{+|x}.
pub fn lhs_oracle(a: &Assemblage) -> Option<bool> {
    let d = a.d;
    let blocks = 1usize << a.g;
    let basis = hermitian_basis(d);
    let sbar = &a.sigma_plus[0] + &a.sigma_minus[0];
    let mut cons = Vec::new();
    let mut rhs = Vec::new();
    for h in &basis {
        let mut c = SymBlockMatrix::new();
        for l in 0..blocks {
            c.add_hermitian(l, h, 1.0);
        }
        cons.push(c);
        rhs.push(h.inner(&sbar).unwrap());
    }
    for x in 0..a.g {
        for h in &basis {
            let mut c = SymBlockMatrix::new();
            for l in (0..blocks).filter(|l| l >> x & 1 == 0) {
                c.add_hermitian(l, h, 1.0);
            }
            cons.push(c);
            rhs.push(h.inner(&a.sigma_plus[x]).unwrap());
        }
    }
    let p = SdpProblem::new(vec![2 * d; blocks], SymBlockMatrix::new(), cons, rhs).unwrap();
    match feasibility(&p, &Settings::default(), 1e-7).unwrap() {
        Feasibility::Feasible { .. } => Some(true),
        Feasibility::Infeasible { .. } => Some(false),
        Feasibility::Undecided { .. } => None,
    }
}

pub fn random_unbiased(g: usize, d: usize, rng: &mut RandomStream) -> SteeringInequality {
    SteeringInequality::unbiased((0..g).map(|_| random_hermitian(d, rng)).collect()).unwrap()
}

