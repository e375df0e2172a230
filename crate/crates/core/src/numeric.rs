//! Small root-finding and minimization routines shared by the solvers.

/// Bisection on a bracketing interval followed by a few secant-Newton
/// polishing steps. Returns `None` when `f(lo)` and `f(hi)` share a sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() <= xtol {
            break;
        }
    }
    Some(newton_polish(&f, 0.5 * (lo + hi), (lo, hi)))
}

/// Newton iterations with a central-difference derivative, kept inside
/// `bounds`. Falls back to the input when a step would leave the bracket.
pub fn newton_polish<F: Fn(f64) -> f64>(f: &F, mut x: f64, bounds: (f64, f64)) -> f64 {
    for _ in 0..8 {
        let fx = f(x);
        if fx == 0.0 {
            break;
        }
        let h = 1e-7 * x.abs().max(1e-3);
        let d = (f(x + h) - f(x - h)) / (2.0 * h);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let nx = x - fx / d;
        if !(bounds.0..=bounds.1).contains(&nx) || f(nx).abs() >= fx.abs() {
            break;
        }
        x = nx;
    }
    x
}

/// All sign-change roots of `f` on `[lo, hi]` found on an `n`-cell grid.
pub fn scan_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    let xs: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    for k in 0..n {
        let (a, b) = (fs[k], fs[k + 1]);
        if !a.is_finite() || !b.is_finite() {
            continue;
        }
        if a == 0.0 || a.signum() != b.signum() {
            if let Some(r) = bisect(&f, xs[k], xs[k + 1], 1e-15) {
                if out.last().map_or(true, |&p| (r - p).abs() > 1e-9) {
                    out.push(r);
                }
            }
        }
    }
    out
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization on `[a, b]` to an interval width of `tol`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .fold((x, fx), |best, p| if p.1 < best.1 { p } else { best })
}

pub type Fn2 = dyn Fn(f64, f64) -> Option<[f64; 2]>;

/// Damped Newton iteration for a 2-D system with a forward-difference
/// Jacobian of step `h`. `f` returns `None` outside its domain; the damping
/// halves the step until the residual norm decreases inside the domain.
pub fn newton2(f: &Fn2, mut x: [f64; 2], h: f64, max_iter: usize) -> Option<([f64; 2], f64)> {
    let norm = |v: [f64; 2]| v[0].abs().max(v[1].abs());
    let mut fx = f(x[0], x[1])?;
    let mut res = norm(fx);
    for _ in 0..max_iter {
        if res < 1e-14 {
            break;
        }
        let fa = f(x[0] + h, x[1])?;
        let fb = f(x[0], x[1] + h)?;
        let j = [
            [(fa[0] - fx[0]) / h, (fb[0] - fx[0]) / h],
            [(fa[1] - fx[1]) / h, (fb[1] - fx[1]) / h],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = [
            (j[1][1] * fx[0] - j[0][1] * fx[1]) / det,
            (-j[1][0] * fx[0] + j[0][0] * fx[1]) / det,
        ];
        let mut lam = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand = [x[0] - lam * dx[0], x[1] - lam * dx[1]];
            if let Some(fc) = f(cand[0], cand[1]) {
                let rc = norm(fc);
                if rc.is_finite() && rc < res {
                    x = cand;
                    fx = fc;
                    res = rc;
                    accepted = true;
                    break;
                }
            }
            lam *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Some((x, res))
}

/// Roots of a 2-D system inside a box. Every grid cell whose corners show a
/// sign change in both components seeds Newton from its center and corners;
/// converged roots closer than `merge` are collapsed.
pub fn scan_roots2(
    f: &Fn2,
    xr: (f64, f64),
    yr: (f64, f64),
    n: usize,
    tol: f64,
    merge: f64,
) -> Vec<[f64; 2]> {
    let gx = |i: usize| xr.0 + (xr.1 - xr.0) * i as f64 / n as f64;
    let gy = |j: usize| yr.0 + (yr.1 - yr.0) * j as f64 / n as f64;
    let grid: Vec<Vec<Option<[f64; 2]>>> =
        (0..=n).map(|i| (0..=n).map(|j| f(gx(i), gy(j))).collect()).collect();
    let changes = |vals: &[Option<[f64; 2]>], k: usize| {
        let v: Vec<f64> = vals.iter().filter_map(|p| p.map(|q| q[k])).collect();
        v.len() == vals.len()
            && v.iter().all(|x| x.is_finite())
            && v.iter().any(|&x| x <= 0.0)
            && v.iter().any(|&x| x >= 0.0)
    };
    let mut roots: Vec<[f64; 2]> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let corners = [grid[i][j], grid[i + 1][j], grid[i][j + 1], grid[i + 1][j + 1]];
            if !(changes(&corners, 0) && changes(&corners, 1)) {
                continue;
            }
            let seeds = [
                [0.5 * (gx(i) + gx(i + 1)), 0.5 * (gy(j) + gy(j + 1))],
                [gx(i), gy(j)],
                [gx(i + 1), gy(j)],
                [gx(i), gy(j + 1)],
                [gx(i + 1), gy(j + 1)],
            ];
            for s in seeds {
                if let Some((r, res)) = newton2(f, s, 1e-6, 60) {
                    // finish with a finer difference step near the root
                    let (r, res) = newton2(f, r, 1e-9 * r[0].abs().max(1e-3), 20)
                        .filter(|p| p.1 <= res)
                        .unwrap_or((r, res));
                    let inside = r[0] >= xr.0 && r[0] <= xr.1 && r[1] >= yr.0 && r[1] <= yr.1;
                    if res < tol
                        && inside
                        && !roots.iter().any(|q| (q[0] - r[0]).hypot(q[1] - r[1]) < merge)
                    {
                        roots.push(r);
                    }
                }
            }
        }
    }
    roots
}
