//! Derivative-free Nelder-Mead simplex minimizer.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Converged once the spread of objective values over the simplex
    /// falls below this.
    pub tolerance: f64,
    pub max_evaluations: usize,
    /// Edge length of the initial simplex along each axis.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_evaluations: 10_000,
            initial_step: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` starting from `start`. Non-finite objective values are
/// treated as `+inf`, so the simplex retreats from infeasible regions.
///
/// After first convergence the simplex is rebuilt around the best point and
/// the search repeated once, which guards against collapse onto a
/// non-stationary point.
pub fn minimize<F>(mut f: F, start: &[f64], options: SimplexOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut best = start.to_vec();
    let mut converged = false;
    let mut value = f64::INFINITY;
    let mut used = 0usize;
    for _ in 0..2 {
        let budget = options.max_evaluations.saturating_sub(used);
        let (point, v, ok, spent) = run(&mut eval, &best, options, budget);
        best = point;
        value = v;
        converged = ok;
        used += spent;
        if !ok {
            break;
        }
    }
    Minimum {
        point: best,
        value,
        evaluations,
        converged,
    }
}

fn run<E>(
    eval: &mut E,
    start: &[f64],
    options: SimplexOptions,
    budget: usize,
) -> (Vec<f64>, f64, bool, usize)
where
    E: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += options.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();
    let mut used = n + 1;

    loop {
        // order ascending; ties keep index order
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        if spread.is_finite() && spread <= options.tolerance {
            return (simplex.swap_remove(0), values[0], true, used);
        }
        if used >= budget {
            return (simplex.swap_remove(0), values[0], false, used);
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|x| x[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = along(REFLECT);
        let fr = eval(&reflected);
        used += 1;

        if fr < values[0] {
            let expanded = along(EXPAND);
            let fe = eval(&expanded);
            used += 1;
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }

        let (contracted, fc) = if fr < values[n] {
            let c = along(CONTRACT);
            let fc = eval(&c);
            (c, fc)
        } else {
            let c = along(-CONTRACT);
            let fc = eval(&c);
            (c, fc)
        };
        used += 1;
        if fc < values[n].min(fr) {
            simplex[n] = contracted;
            values[n] = fc;
            continue;
        }

        let anchor = simplex[0].clone();
        for i in 1..=n {
            for (x, a) in simplex[i].iter_mut().zip(&anchor) {
                *x = a + SHRINK * (*x - a);
            }
            values[i] = eval(&simplex[i]);
            used += 1;
        }
    }
}
