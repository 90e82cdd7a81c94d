//! Quasi-Newton minimization with finite-difference gradients.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions<T> {
    pub max_iters: usize,
    /// Stop once the objective is at or below this value.
    pub target: T,
    /// Stop when the gradient infinity-norm falls below this.
    pub grad_tol: T,
}

impl<T: Real> Default for BfgsOptions<T> {
    fn default() -> Self {
        Self {
            max_iters: 500,
            target: T::neg_infinity(),
            grad_tol: T::lit(1e-12),
        }
    }
}

fn gradient<T: Real>(f: &impl Fn(&[T]) -> T, x: &[T], h: T) -> Vec<T> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = xp[i];
            xp[i] = orig + h;
            let fp = f(&xp);
            xp[i] = orig - h;
            let fm = f(&xp);
            xp[i] = orig;
            (fp - fm) / (h + h)
        })
        .collect()
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// BFGS with Armijo backtracking. Returns the best point found and its value.
pub fn minimize_bfgs<T: Real>(f: impl Fn(&[T]) -> T, x0: &[T], opts: BfgsOptions<T>) -> (Vec<T>, T) {
    let n = x0.len();
    let h = T::epsilon().cbrt();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut g = gradient(&f, &x, h);
    // Inverse Hessian approximation, row-major.
    let mut hinv = identity(n);
    for _ in 0..opts.max_iters {
        if fx <= opts.target {
            break;
        }
        if g.iter().fold(T::zero(), |m, v| m.max(v.abs())) < opts.grad_tol {
            break;
        }
        let mut dir: Vec<T> = (0..n).map(|i| -dot(&hinv[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&dir, &g);
        if slope >= T::zero() {
            hinv = identity(n);
            dir = g.iter().map(|v| -*v).collect();
            slope = dot(&dir, &g);
        }
        let mut step = T::one();
        let mut accepted = None;
        for _ in 0..40 {
            let xn: Vec<T> = x.iter().zip(&dir).map(|(a, d)| *a + step * *d).collect();
            let fxn = f(&xn);
            if fxn <= fx + T::lit(1e-4) * step * slope {
                accepted = Some((xn, fxn));
                break;
            }
            step *= T::lit(0.5);
        }
        let Some((xn, fxn)) = accepted else {
            // No descent along the quasi-Newton direction; retry from steepest descent once.
            if hinv != identity(n) {
                hinv = identity(n);
                continue;
            }
            break;
        };
        let gn = gradient(&f, &xn, h);
        let s: Vec<T> = xn.iter().zip(&x).map(|(a, b)| *a - *b).collect();
        let y: Vec<T> = gn.iter().zip(&g).map(|(a, b)| *a - *b).collect();
        let sy = dot(&s, &y);
        if sy > T::epsilon() * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            let rho = T::one() / sy;
            let hy: Vec<T> = (0..n).map(|i| dot(&hinv[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] += (T::one() + yhy * rho) * rho * s[i] * s[j]
                        - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }
        x = xn;
        fx = fxn;
        g = gn;
    }
    (x, fx)
}

fn identity<T: Real>(n: usize) -> Vec<T> {
    let mut m = vec![T::zero(); n * n];
    for i in 0..n {
        m[i * n + i] = T::one();
    }
    m
}
