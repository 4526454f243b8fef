use dpcomb::instances::format::Instance;
use dpcomb::instances::generate::*;
use dpcomb::RngStream;

use crate::io::{emit, parse_list};
use crate::{CliResult, Failure, GenArgs, Problem};

fn unknown(kind: &str, problem: Problem) -> Failure {
    Failure::config(format!("unknown --kind `{kind}` for {problem:?}"))
}

pub fn generate(a: &GenArgs) -> CliResult<Instance> {
    let mut rng = RngStream::new(a.seed, 0);
    let inst = match a.problem {
        Problem::Vc | Problem::Mincut => Instance::Graph(match a.kind.as_str() {
            "star" => gen_star_graph(a.n)?,
            "two-clique" => {
                if !a.n.is_multiple_of(2) {
                    return Err(Failure::config("two-clique needs an even --n"));
                }
                gen_two_clique_graph(a.n / 2, a.bridge)?
            }
            "random" => gen_random_graph(a.n, a.p, &mut rng)?,
            "regular" => gen_random_regular_graph(a.n, a.degree, &mut rng)?,
            k => return Err(unknown(k, a.problem)),
        }),
        Problem::Wvc => match a.kind.as_str() {
            "random" => Instance::WeightedGraph(gen_weighted_graph(
                a.n,
                a.p,
                &parse_list(&a.classes)?,
                &mut rng,
            )?),
            k => return Err(unknown(k, a.problem)),
        },
        Problem::Metric | Problem::Kmedian | Problem::Facility | Problem::Steiner => {
            Instance::Metric(match a.kind.as_str() {
                "uniform" => gen_uniform_metric(a.n, a.diam)?,
                "line" => gen_line_metric(a.n)?,
                "grid" => {
                    if a.groups == 0 || !a.n.is_multiple_of(a.groups) {
                        return Err(Failure::config("grid needs --groups (rows) dividing --n"));
                    }
                    gen_grid_metric(a.groups, a.n / a.groups)?
                }
                "random" => gen_random_metric(a.n, a.max_len, &mut rng)?,
                "kmedian-lb" => {
                    if a.groups == 0 || !a.n.is_multiple_of(a.groups) {
                        return Err(Failure::config("kmedian-lb needs --groups dividing --n"));
                    }
                    gen_kmedian_lb_metric(a.groups, a.n / a.groups, a.diam)?
                }
                k => return Err(unknown(k, a.problem)),
            })
        }
        Problem::Setcover => match a.kind.as_str() {
            "random" => Instance::SetSystem(gen_random_set_system(a.n, a.m, a.p, &mut rng)?),
            k => return Err(unknown(k, a.problem)),
        },
        Problem::Wsetcover => match a.kind.as_str() {
            "random" => Instance::SetSystem(gen_weighted_set_system(
                a.n,
                a.m,
                a.p,
                &parse_list(&a.classes)?,
                &mut rng,
            )?),
            k => return Err(unknown(k, a.problem)),
        },
        Problem::Cpp => match a.kind.as_str() {
            "coverage" | "random" => Instance::Submodular(gen_coverage_instance(
                a.n, a.m, a.agents, a.p, a.target_p, &mut rng,
            )?),
            k => return Err(unknown(k, a.problem)),
        },
        Problem::Pairs => match a.kind.as_str() {
            "random" => Instance::TerminalPairs(gen_terminal_pairs(a.n, a.agents, &mut rng)?),
            k => return Err(unknown(k, a.problem)),
        },
    };
    Ok(inst)
}

pub fn cmd_gen(a: &GenArgs) -> CliResult<()> {
    let inst = generate(a)?;
    emit(a.out.as_deref(), &inst.to_text())
}
