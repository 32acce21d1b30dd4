use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qsta_core::circuit::text::{parse_circuit, serialize_circuit};
use qsta_core::designs::{build, DesignKind};
use qsta_core::distribution::{check_distributed_zero_idle, distribute};
use qsta_core::ebit::EbitModel;
use qsta_core::sweep::{emit::emit_all, run_sweep, SweepConfig};
use qsta_core::timing::decompose::analyze;
use qsta_core::{Circuit, CuProvider, DelayProfile, DistributedLayout, Nanos, ShorDesignSpec};

#[derive(Parser)]
#[command(
    name = "qsta",
    version,
    about = "Static timing analysis of Shor order-finding circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Circuit delay of a circuit file under a delay profile.
    Analyze {
        circuit: PathBuf,
        /// Preset name or profile file.
        #[arg(long)]
        profile: String,
        /// Also print critical path, idle times and the delay decomposition.
        #[arg(long)]
        report: bool,
    },
    /// Generate a monolithic design.
    Build {
        #[command(flatten)]
        design: DesignArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Generate a design distributed over k ebit channels.
    Distribute {
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long)]
        k: usize,
        /// Ebit generation time, ns.
        #[arg(
            long,
            conflicts_with = "ebit_model",
            required_unless_present = "ebit_model"
        )]
        t_ebit: Option<Nanos>,
        /// Ebit model file or preset name.
        #[arg(long, requires = "d_km")]
        ebit_model: Option<String>,
        /// Link length, km.
        #[arg(long)]
        d_km: Option<f64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a design-space sweep and write CSV outputs.
    Sweep { config: PathBuf },
    /// Expected ebit generation time of a link model.
    EbitTime {
        /// Model file or preset name.
        #[arg(long)]
        model: String,
        #[arg(long)]
        d_km: f64,
    },
}

#[derive(Args)]
struct DesignArgs {
    /// regular, regular_semiclassical, iterative or alternating
    design: String,
    #[arg(long)]
    n: usize,
    /// Phase bits; defaults to 2n.
    #[arg(long)]
    m: Option<usize>,
    /// const:<ns> | list:<ns>,<ns>,... | poly:<c1>,<c2> | import:<dir>
    #[arg(long)]
    cu: String,
    /// Profile for `poly:` CU delays.
    #[arg(long)]
    profile: Option<String>,
    /// Drop the reset after each data qubit's last measurement.
    #[arg(long)]
    no_final_reset: bool,
}

impl DesignArgs {
    fn spec(&self) -> Result<ShorDesignSpec> {
        let design = DesignKind::from_name(&self.design)
            .ok_or_else(|| anyhow!("unknown design `{}`", self.design))?;
        let m = self.m.unwrap_or(2 * self.n);
        let cu = self.provider(m)?;
        Ok(ShorDesignSpec::new(design, self.n, cu)
            .with_m(m)
            .with_final_reset(!self.no_final_reset))
    }

    fn provider(&self, m: usize) -> Result<CuProvider> {
        let (kind, arg) = self
            .cu
            .split_once(':')
            .ok_or_else(|| anyhow!("CU spec `{}` lacks a `kind:` prefix", self.cu))?;
        Ok(match kind {
            "const" => CuProvider::constant(arg.parse().context("const CU delay")?),
            "list" => CuProvider::list(
                arg.split(',')
                    .map(|s| s.trim().parse::<Nanos>())
                    .collect::<Result<_, _>>()
                    .context("CU delay list")?,
            ),
            "poly" => {
                let (c1, c2) = arg
                    .split_once(',')
                    .ok_or_else(|| anyhow!("poly CU spec needs `c1,c2`"))?;
                let (c1, c2): (f64, f64) = (c1.trim().parse()?, c2.trim().parse()?);
                let name = self
                    .profile
                    .as_deref()
                    .ok_or_else(|| anyhow!("poly CU delays need --profile"))?;
                let p = DelayProfile::resolve(name)?;
                let nf = self.n as f64;
                let t = c1 * nf * p.t_q1 as f64 + c2 * nf * nf * p.t_q2 as f64;
                CuProvider::constant(t.round() as Nanos)
            }
            "import" => CuProvider::imported_dir(arg, m)?,
            other => bail!("unknown CU kind `{other}`"),
        })
    }
}

fn write_circuit(c: &Circuit, out: Option<&Path>) -> Result<()> {
    let text = serialize_circuit(c);
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_model(name_or_path: &str) -> Result<EbitModel<f64>> {
    if Path::new(name_or_path).exists() {
        Ok(EbitModel::load(name_or_path)?)
    } else {
        Ok(EbitModel::preset(name_or_path)?)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze {
            circuit,
            profile,
            report,
        } => {
            let text = std::fs::read_to_string(&circuit)
                .with_context(|| format!("reading {}", circuit.display()))?;
            let c: Circuit = parse_circuit(&text)?;
            let p = DelayProfile::resolve(&profile)?;
            let r = analyze(&c, &p)?;
            println!("t_C_ns {}", r.t_c);
            if report {
                let path: Vec<String> = r.critical_path.iter().map(|i| i.to_string()).collect();
                println!("critical_path {}", path.join(" "));
                for (q, idle) in r.idle.iter().enumerate() {
                    println!("idle q{q} {idle}");
                }
                if let (Some(d), Some(b)) = (r.decomposition, r.bounds) {
                    println!("t_H_ns {}", d.t_h);
                    println!("sum_CU_ns {}", d.sum_cu);
                    println!("delta_P_ns {}", d.delta_p);
                    println!("delta_P_M_ns {}", d.delta_p_m);
                    println!("delta_P_notM_ns {}", d.delta_p_not_m);
                    println!("delta_P_M_upper_ns {}", b.delta_p_m_upper);
                    println!("delta_P_M_upper_relaxed_ns {}", b.delta_p_m_upper_relaxed);
                    if r.distributed {
                        println!("delta_D_ns {}", d.delta_d);
                        println!("delta_D_M_ns {}", d.delta_d_m);
                        println!("delta_D_notM_ns {}", d.delta_d_not_m);
                        if let Some(u) = b.delta_d_m_upper {
                            println!("delta_D_M_upper_ns {u}");
                        }
                    }
                }
            }
        }
        Command::Build { design, out } => {
            write_circuit(&build(&design.spec()?)?, out.as_deref())?;
        }
        Command::Distribute {
            design,
            k,
            t_ebit,
            ebit_model,
            d_km,
            out,
        } => {
            let spec = design.spec()?;
            let t_ebit = match (t_ebit, ebit_model) {
                (Some(t), _) => t,
                (None, Some(model)) => load_model(&model)?.time_ns(d_km.expect("clap enforces"))?,
                (None, None) => unreachable!("clap enforces one ebit source"),
            };
            let layout = DistributedLayout::uniform(&spec, k, t_ebit)?;
            let c = distribute(&spec, &layout)?;
            if let Some(name) = &design.profile {
                let zi =
                    check_distributed_zero_idle(&spec, &DelayProfile::resolve(name)?, &layout)?;
                eprintln!(
                    "zero-idle exact={} relaxed={} t_GSE_ns={}",
                    zi.exact, zi.relaxed, zi.t_gse
                );
            }
            write_circuit(&c, out.as_deref())?;
        }
        Command::Sweep { config } => {
            let cfg = SweepConfig::load(&config)?;
            let records = run_sweep(&cfg)?;
            for path in emit_all(&cfg, &records)? {
                println!("{}", path.display());
            }
        }
        Command::EbitTime { model, d_km } => {
            let m = load_model(&model)?;
            if let EbitModel::Link(p) = &m {
                let p = p.at_distance(d_km);
                let (ts, tf) = p.attempt_times();
                println!("p_e {:.6}", p.end_to_end_success_probability());
                println!("T_s_us {ts:.3}");
                println!("T_f_us {tf:.3}");
            }
            let us = m.time_us(d_km)?;
            println!("T_us {us:.3}");
            println!("T_ms {:.4}", us / 1e3);
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
