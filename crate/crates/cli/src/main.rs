use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use imcf::experiment::{builtin_suites, run_experiment, ExperimentConfig};

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Inverse mean curvature flow stability experiments.
#[derive(Parser, Debug)]
#[command(name = "imcf-lab", disable_version_flag = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run { config: PathBuf },
    /// Run the built-in identity suites.
    Suite,
    /// Print the version.
    Version,
}

/// Runs the experiments, printing their reports to `out`; returns the exit code.
fn run_all(configs: &[ExperimentConfig], out: &mut impl std::io::Write) -> u8 {
    let mut passed = true;
    for cfg in configs {
        match run_experiment(cfg) {
            Ok(o) => {
                let _ = write!(out, "{}", o.report());
                for f in &o.files {
                    log::info!("wrote {}", f.display());
                }
                passed &= o.passed();
            }
            Err(e) => {
                eprintln!("imcf-lab: {e}");
                return EXIT_USAGE;
            }
        }
    }
    if passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn execute(cli: Cli, out: &mut impl std::io::Write) -> u8 {
    match cli.command {
        Command::Version => {
            let _ = writeln!(out, "imcf-lab {}", env!("CARGO_PKG_VERSION"));
            EXIT_PASS
        }
        Command::Run { config } => match ExperimentConfig::load(&config) {
            Ok(cfg) => run_all(&[cfg], out),
            Err(e) => {
                eprintln!("imcf-lab: {e}");
                EXIT_USAGE
            }
        },
        Command::Suite => run_all(&builtin_suites(), out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    ExitCode::from(execute(cli, &mut std::io::stdout()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scratch(name: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("imcf-lab-{name}-{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }

    fn run_config(dir: &PathBuf, body: &str) -> (u8, String) {
        let p = dir.join("cfg.toml");
        std::fs::write(&p, body).unwrap();
        let cli = Cli::try_parse_from(["imcf-lab", "run", p.to_str().unwrap()]).unwrap();
        let mut out = Vec::new();
        let code = execute(cli, &mut out);
        (code, String::from_utf8(out).unwrap())
    }

    const FLAT: &str = "scenario = \"identity_suite\"\nt_final = 0.4\n[diagnostics]\nspectral_l_max = 0\ncandidates = false\n";

    #[test]
    fn usage_errors_exit_two() {
        for args in [&["imcf-lab"][..], &["imcf-lab", "frobnicate"], &["imcf-lab", "run"]] {
            assert_eq!(Cli::try_parse_from(args).unwrap_err().exit_code(), 2);
        }
        let cli = Cli::try_parse_from(["imcf-lab", "run", "/nonexistent/cfg.toml"]).unwrap();
        assert_eq!(execute(cli, &mut Vec::new()), EXIT_USAGE);
    }

    #[test]
    fn version_prints_package_version() {
        let mut out = Vec::new();
        assert_eq!(execute(Cli::try_parse_from(["imcf-lab", "version"]).unwrap(), &mut out), EXIT_PASS);
        assert_eq!(String::from_utf8(out).unwrap().trim(), format!("imcf-lab {}", env!("CARGO_PKG_VERSION")));
    }

    #[test]
    fn invalid_family_exits_two() {
        let d = scratch("bad");
        let (code, _) = run_config(
            &d,
            "scenario = \"pmt_stability\"\n[family]\nambient = \"schwarzschild\"\nschedule = \"mass\"\nbase = 0.1\nmembers = 2\n",
        );
        assert_eq!(code, EXIT_USAGE);
        std::fs::remove_dir_all(&d).unwrap();
    }

    #[test]
    fn passing_run_writes_identical_outputs() {
        let d = scratch("ok");
        let out = d.join("out");
        let body = format!("name = \"flat\"\noutput_dir = {:?}\n{FLAT}", out.to_str().unwrap());
        let (code, report) = run_config(&d, &body);
        assert_eq!(code, EXIT_PASS, "{report}");
        assert!(report.ends_with("verdict PASS\n"));
        for f in ["flat_member00.csv", "flat_summary.csv", "flat_report.txt"] {
            assert!(out.join(f).is_file(), "{f}");
        }
        let first = std::fs::read(out.join("flat_member00.csv")).unwrap();
        assert_eq!(run_config(&d, &body).0, EXIT_PASS);
        assert_eq!(std::fs::read(out.join("flat_member00.csv")).unwrap(), first);
        std::fs::remove_dir_all(&d).unwrap();
    }

    #[test]
    fn failed_assertion_exits_one() {
        let d = scratch("fail");
        let (code, report) = run_config(&d, &format!("{FLAT}[tolerances]\narea = -1.0\n"));
        assert_eq!(code, EXIT_FAIL);
        assert!(report.contains("failed area_law"));
        std::fs::remove_dir_all(&d).unwrap();
    }

    #[test]
    fn builtin_suite_passes() {
        let mut out = Vec::new();
        assert_eq!(execute(Cli::try_parse_from(["imcf-lab", "suite"]).unwrap(), &mut out), EXIT_PASS);
        assert_eq!(String::from_utf8(out).unwrap().matches("verdict PASS").count(), builtin_suites().len());
    }
}
