use std::time::Instant;

use dpcomb::audit::{exact_output_distribution, DEFAULT_BUDGET};
use dpcomb::hst::build_frt_tree;
use dpcomb::instances::generate::{gen_random_graph, gen_random_metric, gen_two_clique_graph};
use dpcomb::min_cut::{default_karger_runs, karger_near_min_cuts};
use dpcomb::vertex_cover::UnweightedVc;
use dpcomb::RngStream;

use crate::io::{emit, VERSION};
use crate::{BenchArgs, CliResult};

fn time<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

pub fn cmd_bench(a: &BenchArgs) -> CliResult<()> {
    let mut rng = RngStream::new(a.seed, 0);
    let mut out = format!(
        "# dpcomb {VERSION} bench seed={}\noperation,size,detail,millis\n",
        a.seed
    );

    let n = if a.quick { 12 } else { 30 };
    let g = gen_two_clique_graph(n / 2, 2)?;
    let runs = default_karger_runs(n);
    let (cuts, ms) = time(|| karger_near_min_cuts(&g, 3.0, runs, &mut rng));
    out.push_str(&format!(
        "karger_enumeration,{n},runs={runs} cuts={},{ms:.3}\n",
        cuts?.len()
    ));

    let n = if a.quick { 4 } else { 5 };
    let g = gen_random_graph(n, 0.5, &mut rng)?;
    let (d, ms) = time(|| {
        exact_output_distribution(&UnweightedVc::new(&g, 1.0).expect("valid"), DEFAULT_BUDGET)
    });
    out.push_str(&format!(
        "exact_audit_vc,{n},outcomes={},{ms:.3}\n",
        d?.len()
    ));

    let n = if a.quick { 16 } else { 64 };
    let m = gen_random_metric(n, 20, &mut rng)?;
    let (t, ms) = time(|| build_frt_tree(&m, &mut rng));
    out.push_str(&format!(
        "frt_build,{n},nodes={},{ms:.3}\n",
        t.nodes().len()
    ));

    emit(a.out.as_deref(), &out)
}
