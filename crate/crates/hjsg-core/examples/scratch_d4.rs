use hjsg_core::bench::{run_case, CaseId, RunConfig};

fn main() {
    let t0 = std::time::Instant::now();
    let mut cfg = RunConfig::defaults(CaseId::Hjb, 4, 1).unwrap();
    cfg.m = 3; cfg.max_level = 7; cfg.eps = 1e-4; cfg.eta = 1e-5; cfg.t_final = 0.1;
    let out = run_case(&cfg).unwrap();
    println!("hjb d4 k1 e1e-4: err={:.3e} (band 7.8e-3) maxdof={} steps={} ({:.1?})",
        out.l2_error.unwrap(), out.max_dof, out.steps, t0.elapsed());
}
