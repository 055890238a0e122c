use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nonmarkov::channels::{gad_kraus, validate_cptp, DynamicalMap};
use nonmarkov::cli::{
    detect_regions, find_region_pattern, gnuplot_script, render_csv, render_regions_csv,
    sample_trajectories, ChannelKind, ConfigOverlay, RunConfig, StateChoice,
};
use nonmarkov::nonmarkov::{check_factorization, n_e, n_i, SearchParams, TimeGrid};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const CPTP_TOL: f64 = 1e-10;
const FACTORIZATION_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(
    name = "nmq",
    about = "Qubit+ancilla open-system dynamics and correlation-based memory measures",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonFlags {
    /// Channel family
    #[arg(long)]
    channel: Option<String>,
    /// Oscillation frequency of the mixing parameter
    #[arg(long)]
    omega: Option<f64>,
    /// Critical time after which decoherence is frozen
    #[arg(long)]
    tc: Option<f64>,
    /// End of the time grid
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Number of uniform grid steps
    #[arg(long)]
    steps: Option<usize>,
    /// Initial state: bell, paper, or custom
    #[arg(long)]
    state: Option<String>,
    /// Custom state coefficient a
    #[arg(long)]
    a: Option<f64>,
    /// Custom state coefficient b
    #[arg(long)]
    b: Option<f64>,
    /// Custom state coefficient c
    #[arg(long)]
    c: Option<f64>,
    /// Random seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output file or directory
    #[arg(long)]
    out: Option<String>,
    /// Flat key=value config file
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one initial state and write the trajectory table as CSV
    Trajectory {
        #[command(flatten)]
        common: CommonFlags,
        /// Also emit a gnuplot script next to the CSV
        #[arg(long)]
        gnuplot: bool,
    },
    /// Compute the non-Markovianity measures
    Measure {
        #[command(flatten)]
        common: CommonFlags,
        /// Which measure: ne, ni, or both
        #[arg(value_parser = ["ne", "ni", "both"], default_value = "both")]
        which: String,
        /// Random initial states tried by the ni search
        #[arg(long, default_value_t = 512)]
        samples: usize,
        /// Local perturbation rounds per leading candidate
        #[arg(long = "refine-iters", default_value_t = 100)]
        refine_iters: usize,
        /// Write the search candidates as CSV
        #[arg(long)]
        candidates_out: Option<PathBuf>,
    },
    /// Regenerate the data behind the three reference figures
    Reproduce {
        /// Which figure: fig1, fig2 or fig3
        figure: String,
        /// Output directory
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Also emit gnuplot scripts
        #[arg(long)]
        gnuplot: bool,
    },
    /// Run the CPTP and factorization validators
    Check {
        #[command(flatten)]
        common: CommonFlags,
    },
}

fn resolve_config(common: &CommonFlags) -> Result<RunConfig, String> {
    let mut config = RunConfig::default();
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let overlay = ConfigOverlay::from_config_text(&text).map_err(|e| e.to_string())?;
        config = overlay.apply(config);
    }
    let mut flags = ConfigOverlay {
        omega: common.omega,
        t_c: common.tc,
        t_end: common.t_end,
        steps: common.steps,
        a: common.a,
        b: common.b,
        c: common.c,
        seed: common.seed,
        output_path: common.out.clone(),
        ..ConfigOverlay::default()
    };
    if let Some(ch) = &common.channel {
        flags.channel = Some(match ch.as_str() {
            "gad" => ChannelKind::Gad,
            other => return Err(format!("unknown channel `{other}`")),
        });
    }
    if let Some(st) = &common.state {
        flags.state = Some(match st.as_str() {
            "bell" => StateChoice::Bell,
            "paper" => StateChoice::Paper,
            "custom" => StateChoice::Custom {
                a: 0.0,
                b: 0.0,
                c: 0.0,
            },
            other => return Err(format!("unknown state `{other}`")),
        });
    }
    let config = flags.apply(config);
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| format!("cannot create {}: {e}", parent.display()))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn state_label(amps: &[num_complex::Complex64]) -> String {
    let parts: Vec<String> = amps
        .iter()
        .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
        .collect();
    format!("({})", parts.join(", "))
}

fn cmd_trajectory(common: &CommonFlags, gnuplot: bool) -> Result<(), (u8, String)> {
    let config = resolve_config(common).map_err(|e| (EXIT_USAGE, e))?;
    let rows = sample_trajectories(&config).map_err(|e| (EXIT_NUMERICAL, e.to_string()))?;
    let csv = render_csv(&rows);
    let out = config
        .output_path
        .clone()
        .unwrap_or_else(|| "trajectory.csv".to_string());
    let out = PathBuf::from(out);
    write_file(&out, &csv).map_err(|e| (EXIT_USAGE, e))?;
    println!("wrote {} ({} rows)", out.display(), rows.len());
    if gnuplot {
        let script = gnuplot_script(
            &out,
            &[(2, "EoF"), (3, "I_SA"), (4, "J_AE"), (5, "delta_AE"), (6, "I_AE")],
            "correlation trajectories",
        );
        let script_path = out.with_extension("gp");
        write_file(&script_path, &script).map_err(|e| (EXIT_USAGE, e))?;
        println!("wrote {}", script_path.display());
    }
    Ok(())
}

fn cmd_measure(
    common: &CommonFlags,
    which: &str,
    samples: usize,
    refine_iters: usize,
    candidates_out: Option<&Path>,
) -> Result<(), (u8, String)> {
    let config = resolve_config(common).map_err(|e| (EXIT_USAGE, e))?;
    let channel = config.channel().map_err(|e| (EXIT_USAGE, e.to_string()))?;
    let grid = config.grid().map_err(|e| (EXIT_USAGE, e.to_string()))?;
    if which == "ne" || which == "both" {
        let result = n_e(&channel, grid).map_err(|e| (EXIT_NUMERICAL, e.to_string()))?;
        println!(
            "N_E = {:.12e}  optimal_state = {}  grid_steps = {}  converged = {}",
            result.value,
            state_label(result.optimal_state.amplitudes()),
            result.grid_used.steps,
            result.converged
        );
    }
    if which == "ni" || which == "both" {
        let search = SearchParams {
            n_samples: samples,
            seed: config.seed,
            refine_iters,
        };
        let result = n_i(&channel, grid, search).map_err(|e| (EXIT_NUMERICAL, e.to_string()))?;
        println!(
            "N_I = {:.12e}  optimal_state = {}  grid_steps = {}  converged = {}",
            result.value,
            state_label(result.optimal_state.amplitudes()),
            result.grid_used.steps,
            result.converged
        );
        if let Some(path) = candidates_out {
            let amps = result.optimal_state.amplitudes();
            let mut csv = String::from("re0,im0,re1,im1,re2,im2,re3,im3,value\n");
            for z in amps {
                csv.push_str(&format!("{:.12e},{:.12e},", z.re, z.im));
            }
            csv.push_str(&format!("{:.12e}\n", result.value));
            write_file(path, &csv).map_err(|e| (EXIT_USAGE, e))?;
        }
    }
    Ok(())
}

fn cmd_reproduce(
    figure: &str,
    out_dir: &Path,
    seed: Option<u64>,
    gnuplot: bool,
) -> Result<(), (u8, String)> {
    let mut config = RunConfig::default();
    if let Some(s) = seed {
        config.seed = s;
    }
    let (state, csv_name, columns): (StateChoice, &str, Vec<(usize, &str)>) = match figure {
        "fig1" => (StateChoice::Bell, "fig1_eof.csv", vec![(2, "EoF")]),
        "fig2" => (StateChoice::Paper, "fig2_mi.csv", vec![(3, "I_SA")]),
        "fig3" => (
            StateChoice::Paper,
            "fig3_info.csv",
            vec![(4, "J_AE"), (5, "delta_AE"), (6, "I_AE")],
        ),
        other => return Err((EXIT_USAGE, format!("unknown figure `{other}`"))),
    };
    config.state = state;
    let rows = sample_trajectories(&config).map_err(|e| (EXIT_NUMERICAL, e.to_string()))?;
    let csv_path = out_dir.join(csv_name);
    write_file(&csv_path, &render_csv(&rows)).map_err(|e| (EXIT_USAGE, e))?;
    println!("wrote {}", csv_path.display());
    if figure == "fig3" {
        let regions = detect_regions(&rows, config.t_c);
        let regions_path = out_dir.join("fig3_regions.csv");
        write_file(&regions_path, &render_regions_csv(&regions)).map_err(|e| (EXIT_USAGE, e))?;
        println!("wrote {}", regions_path.display());
        match find_region_pattern(&regions) {
            Some(k) => println!(
                "three-regime pattern found at regions {}..{}",
                k,
                k + 2
            ),
            None => println!("three-regime pattern not found"),
        }
    }
    if gnuplot {
        let script_path = csv_path.with_extension("gp");
        let script = gnuplot_script(&csv_path, &columns, figure);
        write_file(&script_path, &script).map_err(|e| (EXIT_USAGE, e))?;
        println!("wrote {}", script_path.display());
    }
    Ok(())
}

fn cmd_check(common: &CommonFlags) -> Result<(), (u8, String)> {
    let config = resolve_config(common).map_err(|e| (EXIT_USAGE, e))?;
    let channel = config.channel().map_err(|e| (EXIT_USAGE, e.to_string()))?;
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let t = config.t_end * k as f64 / 999.0;
        let ks = channel.at(t).map_err(|e| (EXIT_NUMERICAL, e.to_string()))?;
        worst = worst.max(validate_cptp(&ks));
    }
    println!("cptp max deviation over 1000 times: {worst:.3e}");
    let grid = TimeGrid::new(0.0, config.t_end, 50).map_err(|e| (EXIT_USAGE, e.to_string()))?;
    let residual = check_factorization(&channel, grid, 100, config.seed)
        .map_err(|e| (EXIT_NUMERICAL, e.to_string()))?;
    println!("concurrence factorization max residual (100 states x 50 points): {residual:.3e}");
    // Sanity check against the identity channel's exact Kraus algebra.
    let identity_dev = validate_cptp(&gad_kraus(0.0, &channel.params).unwrap());
    println!("identity snapshot deviation: {identity_dev:.3e}");
    if worst > CPTP_TOL || residual > FACTORIZATION_TOL {
        return Err((
            EXIT_NUMERICAL,
            format!("numerical invariant violated: cptp={worst:.3e}, factorization={residual:.3e}"),
        ));
    }
    println!("all checks passed");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are success; everything else is usage.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match &cli.command {
        Command::Trajectory { common, gnuplot } => cmd_trajectory(common, *gnuplot),
        Command::Measure {
            common,
            which,
            samples,
            refine_iters,
            candidates_out,
        } => cmd_measure(
            common,
            which,
            *samples,
            *refine_iters,
            candidates_out.as_deref(),
        ),
        Command::Reproduce {
            figure,
            out_dir,
            seed,
            gnuplot,
        } => cmd_reproduce(figure, out_dir, *seed, *gnuplot),
        Command::Check { common } => cmd_check(common),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
