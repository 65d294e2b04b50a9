//! Renormalization flow of the cutoff van Hove model on the default grid.

use vanhove::renorm::{renorm_flow, FlowConfig};

fn main() -> vanhove::Result<()> {
    let cfg = FlowConfig::default();
    println!("lambda  E_closed  E_quad  E0-E_quad  gap  overlap  iters  secs");
    for &l in &cfg.lambda_list {
        let t = std::time::Instant::now();
        let one = FlowConfig { lambda_list: vec![l], ..cfg.clone() };
        let r = &renorm_flow(&one)?[0];
        println!(
            "{:>5} {:>12.8} {:>12.8} {:>10.2e} {:>8.5} {:.10} {:>5} {:.1}",
            r.lambda_cut, r.e_shift_closed, r.e_shift_quad, r.renormalized_ground, r.gap,
            r.ground_overlap, r.iters, t.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
