use harper_core::spectral::{
    dense_hermitian_eigen, fourier_mode, unitary_dft, CirculantPlusDiagonal, HermitianCirculant, RealDiagonal,
};
use harper_core::uncertainty::{corollary_defect_bound, donoho_stark_holds, smallest_eigenvalue_bound, theorem1_bound};
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn normalize(mut z: Vec<Complex64>) -> Vec<Complex64> {
    let norm = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    z.iter_mut().for_each(|x| *x /= norm);
    z
}

/// A unit vector mixing a part supported on `s` with a few exponentials, and
/// the frequency set `t` of the same size carrying most of its transform.
fn concentrated_draw(n: usize, rng: &mut ChaCha8Rng) -> (Vec<Complex64>, Vec<usize>, Vec<usize>) {
    let ks = rng.gen_range(1..=8);
    let kt = rng.gen_range(1..=8);
    let s = sample(rng, n, ks).into_vec();
    let freqs = sample(rng, n, kt).into_vec();
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    let w_time: f64 = rng.gen_range(0.0..1.0);
    for &i in &s {
        z[i] += w_time * Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    for &b in &freqs {
        let c = (1.0 - w_time) * Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        for (zi, ei) in z.iter_mut().zip(fourier_mode(n, b)) {
            *zi += c * ei;
        }
    }
    let z = normalize(z);
    let zhat = unitary_dft(&z).unwrap();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| zhat[b].norm().total_cmp(&zhat[a].norm()));
    order.truncate(kt);
    (z, s, order)
}

#[test]
fn donoho_stark_never_violated() {
    let n = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut nonvacuous = 0;
    for _ in 0..10_000 {
        let (z, s, t) = concentrated_draw(n, &mut rng);
        let c = donoho_stark_holds(&z, &s, &t).unwrap();
        assert!(c.holds, "{c:?}");
        nonvacuous += usize::from(c.threshold > 0.0);
    }
    // The draws must actually exercise the inequality.
    assert!(nonvacuous > 1000, "{nonvacuous}");
}

#[test]
fn corollary_never_violated() {
    let n = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let (z, s, t) = concentrated_draw(n, &mut rng);
        if s.len() * t.len() >= n {
            continue;
        }
        let c = corollary_defect_bound(&z, &s, &t).unwrap();
        assert!(c.holds(), "{c:?}");
    }
    for _ in 0..1000 {
        let z = normalize((0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect());
        let c = corollary_defect_bound(&z, &[rng.gen_range(0..n)], &[rng.gen_range(0..n)]).unwrap();
        assert!(c.holds());
    }
}

fn random_pair(n: usize, rng: &mut ChaCha8Rng) -> (HermitianCirculant, RealDiagonal) {
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    row[0] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
    for j in 1..=n / 2 {
        let z = if 2 * j == n {
            Complex64::new(rng.gen_range(-1.0..1.0), 0.0)
        } else {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        };
        row[j] = z;
        row[n - j] = z.conj();
    }
    let d = RealDiagonal::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
    (HermitianCirculant::new(row).unwrap(), d)
}

#[test]
fn bounds_bracket_dense_spectrum_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for n in [15usize, 32, 101] {
        let grid: Vec<usize> = [1, 2, 3, 5, 8, 13].into_iter().filter(|&k| k < n).collect();
        for _ in 0..200 {
            let (c, d) = random_pair(n, &mut rng);
            let dense = CirculantPlusDiagonal::new(c.clone(), d.clone()).unwrap().to_dense();
            let ev = dense_hermitian_eigen(&dense, false).unwrap().eigenvalues;
            let (top, bottom) = (ev[0], ev[n - 1]);
            for &k in &grid {
                for &kp in &grid {
                    if k * kp >= n {
                        continue;
                    }
                    let up = theorem1_bound(&c, &d, k, kp).unwrap().bound;
                    assert!(top <= up + 1e-12, "n={n} k={k} k'={kp}: {top} > {up}");
                    let low = smallest_eigenvalue_bound(&c, &d, k, kp).unwrap().bound;
                    assert!(bottom >= low - 1e-12, "n={n} l={k} l'={kp}: {bottom} < {low}");
                }
            }
        }
    }
}
