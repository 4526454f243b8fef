use dpcomb::audit::adjacency::{
    agent_neighbors, demand_neighbors, edge_adjacent_pairs, edge_neighbors, element_neighbors,
};
use dpcomb::audit::{
    audit_pairs, exact_distribution_by, exact_output_distribution, AuditBound, AuditRecord,
};
use dpcomb::cpp::{cpp_epsilon_prime, cpp_privacy, CppGreedy};
use dpcomb::instances::format::Instance;
use dpcomb::instances::{Graph, WeightedGraph};
use dpcomb::k_median::{LocalSearch, LocalSearchParams};
use dpcomb::min_cut::{MinCutMechanism, MinCutParams};
use dpcomb::set_cover::{permutation_of, UnweightedSc, WeightedSc};
use dpcomb::vertex_cover::{hallucinated_privacy, HallucinatedVc, UnweightedVc, WeightedVc};

use crate::io::{emit, instance_hash, read_instance};
use crate::{AuditArgs, CliResult, Failure, Problem, EXIT_VIOLATION};

/// Frozen regression bound `c` for the weighted vertex cover audit, whose
/// privacy proof only gives `O(epsilon)`.
pub const WVC_AUDIT_CONSTANT: f64 = 4.0;

const TOLERANCE: f64 = 1e-9;

fn graph_pairs(a: &AuditArgs) -> CliResult<(String, Vec<(Graph, Graph)>)> {
    match &a.input {
        Some(p) => match read_instance(p)? {
            Instance::Graph(g) => {
                let name = instance_hash(&Instance::Graph(g.clone()));
                Ok((
                    name,
                    edge_neighbors(&g)
                        .into_iter()
                        .map(|h| (g.clone(), h))
                        .collect(),
                ))
            }
            other => Err(Failure::config(format!(
                "expected a graph fixture, got {}",
                other.kind()
            ))),
        },
        None => {
            if !(2..=5).contains(&a.n) {
                return Err(Failure::config(
                    "--n must lie in 2..=5 for the all-graphs audit",
                ));
            }
            Ok((format!("all-graphs-n{}", a.n), edge_adjacent_pairs(a.n)))
        }
    }
}

fn required(a: &AuditArgs) -> CliResult<Instance> {
    let p = a
        .input
        .as_ref()
        .ok_or_else(|| Failure::config(format!("{:?} audits need --in", a.problem)))?;
    read_instance(p)
}

fn check_params(a: &AuditArgs) -> CliResult<()> {
    if !(a.eps.is_finite() && a.eps > 0.0) {
        return Err(Failure::config("--eps must be positive"));
    }
    if let Some(b) = a.bound_eps {
        if !(b.is_finite() && b >= 0.0) {
            return Err(Failure::config("--bound-eps must be nonnegative"));
        }
    }
    Ok(())
}

pub fn run_audit(a: &AuditArgs) -> CliResult<(AuditRecord, Vec<String>)> {
    check_params(a)?;
    let eps = a.eps;
    let delta = a.delta;
    let budget = a.budget;
    let pure = |default: f64| AuditBound::Pure {
        epsilon: a.bound_eps.unwrap_or(default),
    };
    let mut notes = Vec::new();
    let record = match a.problem {
        Problem::Vc => {
            let (name, pairs) = graph_pairs(a)?;
            match a.algo.as_deref().unwrap_or("unweighted") {
                "unweighted" => audit_pairs(name, &pairs, pure(eps), TOLERANCE, |g: &Graph| {
                    exact_output_distribution(&UnweightedVc::new(g, eps)?, budget)
                })?,
                "hallucinated" => {
                    let alpha = a
                        .alpha
                        .ok_or_else(|| Failure::config("--algo hallucinated needs --alpha"))?;
                    HallucinatedVc::new(&Graph::new(2, [])?, eps, alpha)?;
                    audit_pairs(
                        name,
                        &pairs,
                        pure(hallucinated_privacy(eps, alpha)),
                        TOLERANCE,
                        |g: &Graph| {
                            exact_output_distribution(&HallucinatedVc::new(g, eps, alpha)?, budget)
                        },
                    )?
                }
                other => return Err(Failure::config(format!("unknown --algo `{other}` for vc"))),
            }
        }
        Problem::Wvc => {
            let (name, pairs): (String, Vec<(WeightedGraph, WeightedGraph)>) = match &a.input {
                Some(p) => match read_instance(p)? {
                    Instance::WeightedGraph(w) => {
                        let name = instance_hash(&Instance::WeightedGraph(w.clone()));
                        let pairs = edge_neighbors(w.graph())
                            .into_iter()
                            .map(|h| Ok((w.clone(), WeightedGraph::new(h, w.weights().to_vec())?)))
                            .collect::<Result<_, dpcomb::instances::InstanceError>>()?;
                        (name, pairs)
                    }
                    other => {
                        return Err(Failure::config(format!(
                            "expected a weighted-graph fixture, got {}",
                            other.kind()
                        )))
                    }
                },
                None => {
                    let (name, pairs) = graph_pairs(a)?;
                    let w = |g: Graph| WeightedGraph::new(g, vec![1.0; a.n]);
                    let pairs = pairs
                        .into_iter()
                        .map(|(x, y)| Ok((w(x)?, w(y)?)))
                        .collect::<Result<_, dpcomb::instances::InstanceError>>()?;
                    (name, pairs)
                }
            };
            let r = audit_pairs(
                name,
                &pairs,
                pure(WVC_AUDIT_CONSTANT * eps),
                TOLERANCE,
                |w: &WeightedGraph| exact_output_distribution(&WeightedVc::new(w, eps)?, budget),
            )?;
            notes.push(format!("measured_constant={:.6}", r.measured_epsilon / eps));
            r
        }
        Problem::Mincut => {
            let (name, pairs) = graph_pairs(a)?;
            audit_pairs(name, &pairs, pure(2.0 * eps), TOLERANCE, |g: &Graph| {
                let mech = MinCutMechanism::new(g, eps, MinCutParams::default())?;
                exact_output_distribution(&mech.exact(), budget)
            })?
        }
        Problem::Setcover | Problem::Wsetcover => {
            let sys = match required(a)? {
                Instance::SetSystem(s) => s,
                other => {
                    return Err(Failure::config(format!(
                        "expected a set-system fixture, got {}",
                        other.kind()
                    )))
                }
            };
            let name = instance_hash(&Instance::SetSystem(sys.clone()));
            let pairs: Vec<_> = element_neighbors(&sys)?
                .into_iter()
                .map(|nb| (sys.clone(), nb))
                .collect();
            let bound = AuditBound::Approx {
                epsilon: a.bound_eps.unwrap_or(eps),
                delta,
            };
            if a.problem == Problem::Setcover {
                audit_pairs(name, &pairs, bound, TOLERANCE, |s| {
                    exact_output_distribution(&UnweightedSc::new(s, eps, delta)?, budget)
                })?
            } else if a.augmented {
                notes.push("transcript includes halve events".into());
                audit_pairs(name, &pairs, bound, TOLERANCE, |s| {
                    exact_output_distribution(&WeightedSc::new(s, eps, delta)?, budget)
                })?
            } else {
                audit_pairs(name, &pairs, bound, TOLERANCE, |s| {
                    exact_distribution_by(&WeightedSc::new(s, eps, delta)?, budget, |ev| {
                        permutation_of(ev)
                    })
                })?
            }
        }
        Problem::Cpp => {
            let inst = match required(a)? {
                Instance::Submodular(s) => s,
                other => {
                    return Err(Failure::config(format!(
                        "expected a submodular fixture, got {}",
                        other.kind()
                    )))
                }
            };
            let name = instance_hash(&Instance::Submodular(inst.clone()));
            let pairs: Vec<_> = agent_neighbors(&inst)
                .into_iter()
                .map(|nb| (inst.clone(), nb))
                .collect();
            let k = a.k;
            match a.algo.as_deref().unwrap_or("greedy") {
                "greedy" => {
                    let eps_prime = cpp_epsilon_prime(eps, delta)?;
                    let bound = AuditBound::Approx {
                        epsilon: a.bound_eps.unwrap_or(cpp_privacy(eps_prime, delta)),
                        delta,
                    };
                    audit_pairs(name, &pairs, bound, TOLERANCE, |s| {
                        exact_output_distribution(
                            &CppGreedy::with_round_epsilon(s, k, eps_prime)?,
                            budget,
                        )
                    })?
                }
                "pure" => audit_pairs(name, &pairs, pure(eps), TOLERANCE, |s| {
                    exact_output_distribution(&CppGreedy::pure(s, k, eps)?, budget)
                })?,
                other => return Err(Failure::config(format!("unknown --algo `{other}` for cpp"))),
            }
        }
        Problem::Kmedian => {
            let m = match required(a)? {
                Instance::Metric(m) => m,
                other => {
                    return Err(Failure::config(format!(
                        "expected a metric fixture, got {}",
                        other.kind()
                    )))
                }
            };
            let name = instance_hash(&Instance::Metric(m.clone()));
            let pairs: Vec<_> = demand_neighbors(&m)?
                .into_iter()
                .map(|nb| (m.clone(), nb))
                .collect();
            let params = LocalSearchParams {
                rounds: Some(a.rounds),
            };
            let k = a.k;
            audit_pairs(name, &pairs, pure(eps), TOLERANCE, |x| {
                exact_output_distribution(&LocalSearch::new(x, k, eps, params)?, budget)
            })?
        }
        other => return Err(Failure::config(format!("no exact audit for {other:?}"))),
    };
    Ok((record, notes))
}

pub fn cmd_audit(a: &AuditArgs) -> CliResult<()> {
    let (record, notes) = run_audit(a)?;
    let mut out = format!(
        "# dpcomb audit problem={:?} algo={} eps={} delta={}\n",
        a.problem,
        a.algo.as_deref().unwrap_or("default"),
        a.eps,
        a.delta
    )
    .to_lowercase();
    for n in notes {
        out.push_str(&format!("# {n}\n"));
    }
    out.push_str(&record.to_string());
    out.push('\n');
    let pass = record.passed();
    out.push_str(if pass {
        "result: pass\n"
    } else {
        "result: fail\n"
    });
    emit(a.out.as_deref(), &out)?;
    if pass {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VIOLATION,
            message: format!(
                "audit bound violated: measured eps {:.6}",
                record.measured_epsilon
            ),
        })
    }
}
