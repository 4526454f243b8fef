use rayon::prelude::*;

use dpcomb::amplify::{private_amplify, AmplifiedOutcome, FnMechanism};
use dpcomb::audit::oracle::{
    brute_cpp, brute_facility_location, brute_kmedian, brute_set_cover, brute_vertex_cover,
    brute_weighted_vertex_cover,
};
use dpcomb::cpp::{private_cpp_expmech, private_cpp_greedy, total_welfare, CppGreedy};
use dpcomb::hst::{assign_demands, private_facility_location, steiner_forest_route};
use dpcomb::instances::format::Instance;
use dpcomb::instances::{
    Graph, MetricInstance, SetSystem, SubmodularInstance, TerminalPairs, WeightedGraph,
};
use dpcomb::k_median::{kmedian_cost, private_kmedian_expmech, private_kmedian_localsearch};
use dpcomb::min_cut::{cut_cost, global_min_cut_value, MinCutMechanism, MinCutMode, MinCutParams};
use dpcomb::sequential::run_mechanism;
use dpcomb::set_cover::{
    decode_set_cover, private_set_cover_expmech, private_set_cover_scaled,
    private_set_cover_unweighted, private_set_cover_weighted,
};
use dpcomb::vertex_cover::{
    decode_cover, private_vc_hallucinated, private_vc_unweighted, private_vc_weighted,
};
use dpcomb::RngStream;

use crate::io::{emit, instance_hash, read_instance, VERSION};
use crate::{CliResult, Failure, Problem, RunArgs};

/// Whether larger values of the per-trial quantity are better.
#[derive(Clone, Copy, PartialEq)]
enum Sense {
    Minimize,
    Maximize,
}

/// Per-trial sampler returning the trial's cost or welfare.
type Trial<'a> = Box<dyn Fn(&mut RngStream) -> dpcomb::Result<f64> + Sync + 'a>;

/// One configured experiment: a per-trial sampler plus the optimum.
struct Experiment<'a> {
    algo: String,
    sense: Sense,
    opt: Option<f64>,
    notes: Vec<String>,
    trial: Trial<'a>,
}

fn expect_graph(inst: &Instance) -> CliResult<&Graph> {
    match inst {
        Instance::Graph(g) => Ok(g),
        other => Err(Failure::config(format!(
            "expected a graph document, got {}",
            other.kind()
        ))),
    }
}

fn expect_weighted(inst: &Instance) -> CliResult<&WeightedGraph> {
    match inst {
        Instance::WeightedGraph(g) => Ok(g),
        other => Err(Failure::config(format!(
            "expected a weighted-graph document, got {}",
            other.kind()
        ))),
    }
}

fn expect_metric(inst: &Instance) -> CliResult<&MetricInstance> {
    match inst {
        Instance::Metric(m) => Ok(m),
        other => Err(Failure::config(format!(
            "expected a metric document, got {}",
            other.kind()
        ))),
    }
}

fn expect_sets(inst: &Instance) -> CliResult<&SetSystem> {
    match inst {
        Instance::SetSystem(s) => Ok(s),
        other => Err(Failure::config(format!(
            "expected a set-system document, got {}",
            other.kind()
        ))),
    }
}

fn expect_submodular(inst: &Instance) -> CliResult<&SubmodularInstance> {
    match inst {
        Instance::Submodular(s) => Ok(s),
        other => Err(Failure::config(format!(
            "expected a submodular document, got {}",
            other.kind()
        ))),
    }
}

fn bad_algo(algo: &str, problem: Problem) -> Failure {
    Failure::config(format!("unknown --algo `{algo}` for {problem:?}"))
}

fn optional<T>(skip: bool, f: impl FnOnce() -> dpcomb::Result<T>) -> Option<T> {
    if skip {
        None
    } else {
        f().ok()
    }
}

fn check_common(a: &RunArgs) -> CliResult<()> {
    if !(a.eps.is_finite() && a.eps > 0.0) {
        return Err(Failure::config(format!(
            "--eps must be positive, got {}",
            a.eps
        )));
    }
    if !(a.delta.is_finite() && a.delta > 0.0 && a.delta < 1.0) {
        return Err(Failure::config(format!(
            "--delta must lie in (0, 1), got {}",
            a.delta
        )));
    }
    Ok(())
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

fn build<'a>(
    a: &'a RunArgs,
    inst: &'a Instance,
    pairs: Option<&'a TerminalPairs>,
) -> CliResult<Experiment<'a>> {
    let (eps, delta, k, f) = (a.eps, a.delta, a.k, a.f);
    let skip = a.no_opt;
    let mut notes = Vec::new();
    let exp = match a.problem {
        Problem::Vc => {
            let g = expect_graph(inst)?;
            let opt = optional(skip, || brute_vertex_cover(g)).map(|(c, _)| c as f64);
            let algo = a.algo.clone().unwrap_or_else(|| "unweighted".into());
            let trial: Trial = match algo.as_str() {
                "unweighted" => Box::new(move |rng| {
                    Ok(decode_cover(g, &private_vc_unweighted(g, eps, rng)?)?.len() as f64)
                }),
                "hallucinated" => {
                    let alpha = a
                        .alpha
                        .ok_or_else(|| Failure::config("--algo hallucinated needs --alpha"))?;
                    dpcomb::vertex_cover::HallucinatedVc::new(g, eps, alpha)?;
                    Box::new(move |rng| {
                        Ok(
                            decode_cover(g, &private_vc_hallucinated(g, eps, alpha, rng)?)?.len()
                                as f64,
                        )
                    })
                }
                "amplified" => {
                    if a.pilot == 0 {
                        return Err(Failure::config("--pilot must be at least 1"));
                    }
                    let score = |g: &Graph, perm: &Vec<usize>| {
                        -(decode_cover(g, perm).map_or(f64::INFINITY, |c| c.len() as f64))
                    };
                    let pilot_rng = RngStream::new(a.seed, 1);
                    let pilot: Vec<f64> = (0..a.pilot)
                        .map(|i| {
                            Ok(score(
                                g,
                                &private_vc_unweighted(g, eps, &mut pilot_rng.child(i as u64))?,
                            ))
                        })
                        .collect::<dpcomb::Result<_>>()?;
                    let q = median(pilot);
                    let eps_prime = eps.min(0.5);
                    let params = dpcomb::amplify::amplification_parameters(eps_prime, delta, 0.5)?;
                    notes.push(format!(
                        "amplification T={} T'={} eps'={eps_prime} p=0.5",
                        params.t, params.t_prime
                    ));
                    notes.push(format!(
                        "amplification target Q={q} estimated from {} NON-PRIVATE pilot runs",
                        a.pilot
                    ));
                    Box::new(move |rng| {
                        let mech = FnMechanism::new(
                            |g: &Graph, r: &mut RngStream| {
                                private_vc_unweighted(g, eps, r).expect("validated")
                            },
                            score,
                        );
                        Ok(
                            match private_amplify(&mech, g, q, eps_prime, delta, 0.5, rng)? {
                                AmplifiedOutcome::Real { outcome, .. } => {
                                    decode_cover(g, &outcome)?.len() as f64
                                }
                                // a dummy leaves the fallback of taking every vertex
                                AmplifiedOutcome::Dummy { .. } => g.n() as f64,
                            },
                        )
                    })
                }
                other => return Err(bad_algo(other, a.problem)),
            };
            Experiment {
                algo,
                sense: Sense::Minimize,
                opt,
                notes: Vec::new(),
                trial,
            }
        }
        Problem::Wvc => {
            let w = expect_weighted(inst)?;
            let algo = a.algo.clone().unwrap_or_else(|| "weighted".into());
            if algo != "weighted" {
                return Err(bad_algo(&algo, a.problem));
            }
            Experiment {
                algo,
                sense: Sense::Minimize,
                opt: optional(skip, || brute_weighted_vertex_cover(w)).map(|(c, _)| c),
                notes: Vec::new(),
                trial: Box::new(move |rng| {
                    Ok(w.cover_cost(&decode_cover(
                        w.graph(),
                        &private_vc_weighted(w, eps, rng)?,
                    )?))
                }),
            }
        }
        Problem::Mincut => {
            let g = expect_graph(inst)?;
            let algo = a.algo.clone().unwrap_or_else(|| "sampled".into());
            let mode = match algo.as_str() {
                "sampled" => MinCutMode::Sampled,
                "exact" => MinCutMode::Exact,
                other => return Err(bad_algo(other, a.problem)),
            };
            let mech = MinCutMechanism::new(g, eps, MinCutParams::default())?;
            Experiment {
                algo,
                sense: Sense::Minimize,
                opt: optional(skip, || global_min_cut_value(g)).map(|v| v as f64),
                notes: Vec::new(),
                trial: Box::new(move |rng| Ok(cut_cost(g, &mech.sample(mode, rng)?) as f64)),
            }
        }
        Problem::Kmedian => {
            let m = expect_metric(inst)?;
            let algo = a.algo.clone().unwrap_or_else(|| "localsearch".into());
            let trial: Trial = match algo.as_str() {
                "localsearch" => {
                    dpcomb::k_median::LocalSearch::new(m, k, eps, Default::default())?;
                    Box::new(move |rng| {
                        Ok(kmedian_cost(
                            m,
                            &private_kmedian_localsearch(m, k, eps, rng)?,
                        ))
                    })
                }
                "expmech" => Box::new(move |rng| {
                    Ok(kmedian_cost(m, &private_kmedian_expmech(m, k, eps, rng)?))
                }),
                other => return Err(bad_algo(other, a.problem)),
            };
            Experiment {
                algo,
                sense: Sense::Minimize,
                opt: optional(skip, || brute_kmedian(m, k)).map(|(c, _)| c),
                notes: Vec::new(),
                trial,
            }
        }
        Problem::Setcover | Problem::Wsetcover => {
            let s = expect_sets(inst)?;
            let default = if a.problem == Problem::Setcover {
                "unweighted"
            } else {
                "weighted"
            };
            let algo = a.algo.clone().unwrap_or_else(|| default.into());
            let trial: Trial = match algo.as_str() {
                "unweighted" => {
                    dpcomb::set_cover::set_cover_epsilon_prime(eps, delta)?;
                    Box::new(move |rng| {
                        Ok(
                            decode_set_cover(
                                s,
                                &private_set_cover_unweighted(s, eps, delta, rng)?,
                            )?
                            .1,
                        )
                    })
                }
                "weighted" => {
                    dpcomb::set_cover::WeightedSc::new(s, eps, delta)?;
                    Box::new(move |rng| {
                        Ok(
                            decode_set_cover(s, &private_set_cover_weighted(s, eps, delta, rng)?)?
                                .1,
                        )
                    })
                }
                "scaled" => {
                    Box::new(move |rng| Ok(private_set_cover_scaled(s, eps, delta, rng)?.1))
                }
                "expmech" => Box::new(move |rng| {
                    Ok(decode_set_cover(s, &private_set_cover_expmech(s, eps, rng)?)?.1)
                }),
                other => return Err(bad_algo(other, a.problem)),
            };
            Experiment {
                algo,
                sense: Sense::Minimize,
                opt: optional(skip, || brute_set_cover(s)).map(|(c, _)| c),
                notes: Vec::new(),
                trial,
            }
        }
        Problem::Cpp => {
            let s = expect_submodular(inst)?;
            let algo = a.algo.clone().unwrap_or_else(|| "greedy".into());
            let trial: Trial = match algo.as_str() {
                "greedy" => {
                    CppGreedy::new(s, k, eps, delta)?;
                    Box::new(move |rng| {
                        Ok(total_welfare(
                            s,
                            &private_cpp_greedy(s, k, eps, delta, rng)?,
                        ))
                    })
                }
                "pure" => {
                    let mech = CppGreedy::pure(s, k, eps)?;
                    Box::new(move |rng| Ok(total_welfare(s, &run_mechanism(&mech, rng))))
                }
                "expmech" => {
                    Box::new(move |rng| Ok(total_welfare(s, &private_cpp_expmech(s, k, eps, rng)?)))
                }
                other => return Err(bad_algo(other, a.problem)),
            };
            Experiment {
                algo,
                sense: Sense::Maximize,
                opt: optional(skip, || brute_cpp(s, k)).map(|(c, _)| c),
                notes: Vec::new(),
                trial,
            }
        }
        Problem::Facility => {
            let m = expect_metric(inst)?;
            let algo = a.algo.clone().unwrap_or_else(|| "frt".into());
            if algo != "frt" {
                return Err(bad_algo(&algo, a.problem));
            }
            if !(f.is_finite() && f > 0.0) {
                return Err(Failure::config("--f must be positive"));
            }
            Experiment {
                algo,
                sense: Sense::Minimize,
                opt: optional(skip, || brute_facility_location(m, f)).map(|(c, _)| c),
                notes: vec!["cost is measured on the tree".into()],
                trial: Box::new(move |rng| {
                    let plan = private_facility_location(m, f, eps, rng)?;
                    Ok(assign_demands(&plan, m.demands(), f).total())
                }),
            }
        }
        Problem::Steiner => {
            let m = expect_metric(inst)?;
            let p = pairs.ok_or_else(|| Failure::config("steiner needs --pairs"))?;
            if p.points() != m.n() {
                return Err(Failure::config(
                    "pairs document and metric disagree on the point count",
                ));
            }
            let algo = a.algo.clone().unwrap_or_else(|| "frt".into());
            if algo != "frt" {
                return Err(bad_algo(&algo, a.problem));
            }
            Experiment {
                algo,
                sense: Sense::Minimize,
                opt: None,
                notes: vec!["cost is measured on the tree".into()],
                trial: Box::new(move |rng| Ok(steiner_forest_route(m, p, rng).1)),
            }
        }
        Problem::Metric | Problem::Pairs => {
            return Err(Failure::config(format!(
                "{:?} is a generator target, not a runnable problem",
                a.problem
            )))
        }
    };
    Ok(Experiment {
        notes: [exp.notes, notes].concat(),
        ..exp
    })
}

fn fmt_opt(x: Option<f64>) -> String {
    x.filter(|v| v.is_finite())
        .map_or(String::new(), |v| v.to_string())
}

pub fn cmd_run(a: &RunArgs) -> CliResult<()> {
    check_common(a)?;
    let inst = read_instance(&a.input)?;
    let pairs = match &a.pairs {
        Some(p) => match read_instance(p)? {
            Instance::TerminalPairs(tp) => Some(tp),
            other => {
                return Err(Failure::config(format!(
                    "--pairs expects terminal-pairs, got {}",
                    other.kind()
                )))
            }
        },
        None => None,
    };
    let exp = build(a, &inst, pairs.as_ref())?;
    let hash = instance_hash(&inst);
    let root = RngStream::new(a.seed, 0);
    let costs: Vec<f64> = (0..a.trials)
        .into_par_iter()
        .map(|t| (exp.trial)(&mut root.child(t as u64)))
        .collect::<dpcomb::Result<_>>()?;

    let mut out = format!(
        "# dpcomb {VERSION} problem={:?} algo={} eps={} delta={} trials={} seed={} instance={hash}\n",
        a.problem, exp.algo, a.eps, a.delta, a.trials, a.seed
    )
    .to_lowercase();
    for n in &exp.notes {
        out.push_str(&format!("# note: {n}\n"));
    }
    out.push_str("trial,seed,instance_hash,version,cost,opt,ratio,gap\n");
    let mut ratios = Vec::new();
    let mut gaps = Vec::new();
    for (t, &c) in costs.iter().enumerate() {
        let (ratio, gap) = match exp.opt {
            Some(o) => {
                let gap = match exp.sense {
                    Sense::Minimize => c - o,
                    Sense::Maximize => o - c,
                };
                let ratio = if o > 0.0 { Some(c / o) } else { None };
                (ratio, Some(gap))
            }
            None => (None, None),
        };
        ratios.extend(ratio);
        gaps.extend(gap);
        out.push_str(&format!(
            "{t},{},{hash},{VERSION},{c},{},{},{}\n",
            a.seed,
            fmt_opt(exp.opt),
            fmt_opt(ratio),
            fmt_opt(gap)
        ));
    }
    if !costs.is_empty() {
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let mut sorted = costs.clone();
        sorted.sort_by(f64::total_cmp);
        let p95 = sorted[((0.95 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1];
        out.push_str(&format!(
            "# summary trials={} mean_cost={} p95_cost={} opt={} mean_ratio={} mean_gap={}\n",
            costs.len(),
            mean(&costs),
            p95,
            fmt_opt(exp.opt),
            if ratios.is_empty() {
                String::new()
            } else {
                mean(&ratios).to_string()
            },
            if gaps.is_empty() {
                String::new()
            } else {
                mean(&gaps).to_string()
            },
        ));
    }
    emit(a.out.as_deref(), &out)
}
