//! Sector Hamiltonian and propagators against dense reference constructions.

use std::f64::consts::TAU;

use num_complex::Complex64;
use starkmbl::evolution::{evolve_exact, evolve_krylov, full_diagonalize, KrylovConfig};
use starkmbl::model::{
    build_hamiltonian, DeviceGraph, Edge, LadderParams, PotentialProfile, QuantumState, SectorBasis,
};

type Dense = Vec<Vec<f64>>;

fn kron(a: &Dense, b: &Dense) -> Dense {
    let (na, nb) = (a.len(), b.len());
    let mut out = vec![vec![0.0; na * nb]; na * nb];
    for r1 in 0..na {
        for c1 in 0..na {
            if a[r1][c1] == 0.0 {
                continue;
            }
            for r2 in 0..nb {
                for c2 in 0..nb {
                    out[r1 * nb + r2][c1 * nb + c2] = a[r1][c1] * b[r2][c2];
                }
            }
        }
    }
    out
}

/// ⊗ over sites, site 0 least significant; `local(q)` gives the 2×2 factor.
fn product(n: usize, local: impl Fn(usize) -> Dense) -> Dense {
    let mut m = vec![vec![1.0]];
    for q in (0..n).rev() {
        m = kron(&m, &local(q));
    }
    m
}

fn add_scaled(acc: &mut Dense, m: &Dense, s: f64) {
    for (ra, rm) in acc.iter_mut().zip(m) {
        for (a, x) in ra.iter_mut().zip(rm) {
            *a += s * x;
        }
    }
}

/// Full 2^N matrix of Σ J (σ⁺_iσ⁻_j + σ⁻_iσ⁺_j) + Σ W_j n_j in rad/μs.
fn dense_full(graph: &DeviceGraph, w: &[f64]) -> Dense {
    let n = graph.n_sites();
    let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    let raise = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
    let lower = vec![vec![0.0, 1.0], vec![0.0, 0.0]];
    let num = vec![vec![0.0, 0.0], vec![0.0, 1.0]];
    let dim = 1 << n;
    let mut h = vec![vec![0.0; dim]; dim];
    for e in graph.edges() {
        for (a, b) in [(&raise, &lower), (&lower, &raise)] {
            let term = product(n, |q| {
                if q == e.i {
                    a.clone()
                } else if q == e.j {
                    b.clone()
                } else {
                    id.clone()
                }
            });
            add_scaled(&mut h, &term, TAU * e.coupling);
        }
    }
    for (j, &wj) in w.iter().enumerate() {
        let term = product(n, |q| if q == j { num.clone() } else { id.clone() });
        add_scaled(&mut h, &term, TAU * wj);
    }
    h
}

fn check_against_dense(graph: &DeviceGraph, potential: &PotentialProfile, n_exc: usize) {
    let n = graph.n_sites();
    let basis = SectorBasis::new(n, n_exc).unwrap();
    let h = build_hamiltonian(graph, potential, &basis).unwrap();
    let full = dense_full(graph, &potential.site_energies(n).unwrap());
    let states: Vec<usize> = basis.states().map(|b| b as usize).collect();
    for (r, &sr) in states.iter().enumerate() {
        for (c, &sc) in states.iter().enumerate() {
            let d = (full[sr][sc] - h.get(r, c)).abs();
            assert!(d <= 1e-12, "N={n} entry ({r},{c}) differs by {d}");
        }
        // H conserves the excitation number: no weight outside the sector
        for (s, row) in full.iter().enumerate() {
            if s.count_ones() as usize != n_exc {
                assert_eq!(row[sr], 0.0);
            }
        }
    }
}

#[test]
fn ladder_sector_matches_kron_construction() {
    for n in [2, 3, 5, 6, 8, 10] {
        let graph = DeviceGraph::default_ladder(n).unwrap();
        check_against_dense(&graph, &PotentialProfile::stark(2.7), n / 2);
    }
}

#[test]
fn off_half_filling_and_custom_graph() {
    let graph = DeviceGraph::new(
        5,
        [
            Edge { i: 0, j: 3, coupling: 1.1 },
            Edge { i: 4, j: 1, coupling: -0.4 },
            Edge { i: 2, j: 3, coupling: 2.5 },
        ],
    )
    .unwrap();
    for k in 0..=5 {
        check_against_dense(&graph, &PotentialProfile::stark(-1.3), k);
    }
    let params = LadderParams {
        spread: 0.0,
        ..LadderParams::default()
    };
    let uniform = DeviceGraph::triangular_ladder(7, &params).unwrap();
    check_against_dense(&uniform, &PotentialProfile::zero(), 2);
}

fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// exp(−iHt) by Taylor series with scaling and squaring.
fn expm(h: &[Vec<f64>], t_us: f64) -> Vec<Vec<Complex64>> {
    let n = h.len();
    let norm: f64 = h.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = ((norm * t_us).max(1.0).log2().ceil() as u32) + 4;
    let dt = t_us / f64::from(1u32 << squarings);
    let a: Vec<Vec<Complex64>> = h
        .iter()
        .map(|r| r.iter().map(|&x| Complex64::new(0.0, -x * dt)).collect())
        .collect();
    let mut result: Vec<Vec<Complex64>> =
        (0..n).map(|i| (0..n).map(|j| Complex64::new(f64::from(u8::from(i == j)), 0.0)).collect()).collect();
    let mut term = result.clone();
    for k in 1..30 {
        term = matmul(&term, &a);
        term.iter_mut().flatten().for_each(|x| *x /= k as f64);
        for (r, tr) in result.iter_mut().zip(&term) {
            for (x, y) in r.iter_mut().zip(tr) {
                *x += y;
            }
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

#[test]
fn propagators_match_dense_exponential() {
    let n = 6;
    let graph = DeviceGraph::default_ladder(n).unwrap();
    let basis = SectorBasis::new(n, 3).unwrap();
    let h = build_hamiltonian(&graph, &PotentialProfile::stark(5.0), &basis).unwrap();
    let d = basis.dimension();
    let dense: Vec<Vec<f64>> = (0..d).map(|r| (0..d).map(|c| h.get(r, c)).collect()).collect();
    let psi0 = QuantumState::product(&basis, 0b010101).unwrap();
    let eig = full_diagonalize(&h).unwrap();
    for t_ns in [0.5, 13.0, 250.0] {
        let u = expm(&dense, t_ns * 1e-3);
        let reference: Vec<Complex64> = (0..d)
            .map(|r| (0..d).map(|c| u[r][c] * psi0.amplitudes()[c]).sum())
            .collect();
        let reference = psi0.with_amplitudes(reference);
        let exact = evolve_exact(&eig, &psi0, t_ns).unwrap();
        let (krylov, _) = evolve_krylov(&h, &psi0, t_ns, &KrylovConfig::default()).unwrap();
        assert!(exact.max_abs_diff(&reference) < 1e-10, "exact at {t_ns} ns");
        assert!(krylov.max_abs_diff(&reference) < 1e-9, "krylov at {t_ns} ns");
    }
}

#[test]
fn two_site_swap_is_analytic() {
    let j = 3.1;
    let graph = DeviceGraph::chain(2, j).unwrap();
    let basis = SectorBasis::new(2, 1).unwrap();
    let h = build_hamiltonian(&graph, &PotentialProfile::zero(), &basis).unwrap();
    let psi0 = QuantumState::product(&basis, 0b01).unwrap();
    let eig = full_diagonalize(&h).unwrap();
    for t in [0.0, 7.0, 41.0, 80.6, 999.0] {
        let psi = evolve_exact(&eig, &psi0, t).unwrap();
        let p = psi.amplitudes()[basis.rank(0b01).unwrap()].norm_sqr();
        let expect = (TAU * j * t * 1e-3).cos().powi(2);
        assert!((p - expect).abs() < 1e-12);
    }
}
