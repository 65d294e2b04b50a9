//! Loading a run configuration and driving a command without the binary.

use vanhove::cli::{cmd_identities, OutputFormat, RunConfig, Syntax};

fn main() -> vanhove::Result<()> {
    let cfg = RunConfig::parse(
        "[model]\ng = 1.0\ne0 = 1.0\n[solver]\nseed = 3\n[identities]\ntrials = 10\n",
        Syntax::Toml,
    )?;
    let out = cmd_identities(cfg.solver.seed, cfg.trials, OutputFormat::Json)?;
    println!("exit code {}: {}", out.code, out.summary);
    Ok(())
}
