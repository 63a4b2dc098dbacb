use std::path::PathBuf;
use std::process::ExitCode;

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command as App};
use shocklab::config::{describe_schema, parse_config, run_schema, schema, Command, ConfigError, KeySpec, RunConfig};
use shocklab::experiment::{run_experiment, ExperimentError};

fn flag_name(key: &'static str) -> &'static str {
    Box::leak(key.replace('_', "-").into_boxed_str())
}

fn key_args(specs: &'static [KeySpec]) -> impl Iterator<Item = Arg> {
    specs.iter().map(|s| {
        let mut help = s.doc.to_string();
        if let Some(d) = s.default {
            help.push_str(&format!(" [default: {d}]"));
        }
        let mut arg = Arg::new(s.name)
            .long(flag_name(s.name))
            .value_name("VALUE")
            .help(help)
            .allow_hyphen_values(true);
        if s.name == "json" {
            arg = arg.visible_alias("out");
        }
        arg
    })
}

fn common_args() -> Vec<Arg> {
    vec![
        Arg::new("config")
            .long("config")
            .short('c')
            .value_name("FILE")
            .value_parser(value_parser!(PathBuf))
            .help("Start from this configuration file; flags override its values"),
        Arg::new("set")
            .long("set")
            .value_name("KEY=VALUE")
            .action(ArgAction::Append)
            .help("Override any configuration key"),
    ]
}

fn command_app(name: &'static str, about: &'static str, cmd: Command) -> App {
    App::new(name)
        .about(about)
        .args(common_args())
        .args(key_args(schema(cmd)))
        .args(key_args(run_schema()))
}

fn cli() -> App {
    App::new("shocklab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Small-data shock formation experiments for quasilinear wave equations")
        .arg(
            Arg::new("help_config")
                .long("help-config")
                .action(ArgAction::SetTrue)
                .help("Print every configuration section and key, then exit"),
        )
        .subcommand(command_app(
            "burgers",
            "Blow-up of Burgers' equation by characteristics",
            Command::Burgers,
        ))
        .subcommand(
            App::new("john")
                .about("Spherically symmetric solutions of John's equation in geometric coordinates")
                .subcommand_required(true)
                .subcommand(command_app("solve", "Evolve one data set until a shock or a stop condition", Command::JohnSolve))
                .subcommand(command_app("predict", "Shock time predicted by the reduced model", Command::JohnPredict))
                .subcommand(command_app("sweep", "Independent solves over a list of amplitudes", Command::JohnSweep)),
        )
        .subcommand(
            App::new("nullcond")
                .about("Null condition analysis of quadratic nonlinearities")
                .subcommand_required(true)
                .subcommand(command_app("check", "Classic null condition test", Command::NullcondCheck))
                .subcommand(command_app("aleph", "Failure factors over the sphere", Command::NullcondAleph))
                .subcommand(command_app("fluid", "Derived quantities of a fluid Lagrangian", Command::NullcondFluid)),
        )
        .subcommand(command_app(
            "lifespan",
            "Radiation field, John–Hörmander bound and the fluid functional S",
            Command::Lifespan,
        ))
        .subcommand(
            App::new("run")
                .about("Run the experiment described by a configuration file")
                .arg(
                    Arg::new("file")
                        .required(true)
                        .value_name("CONFIG")
                        .value_parser(value_parser!(PathBuf)),
                )
                .arg(common_args().remove(1))
                .args(key_args(run_schema())),
        )
        .subcommand(App::new("schema").about("Print every configuration section and key"))
}

fn read_config(path: &PathBuf) -> Result<RunConfig, ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(parse_config(&text)?)
}

fn apply_overrides(cfg: &mut RunConfig, m: &ArgMatches, keys: &[&'static [KeySpec]]) -> Result<(), ConfigError> {
    for specs in keys {
        for s in specs.iter() {
            if let Some(v) = m.get_one::<String>(s.name) {
                cfg.set(s.name, v)?;
            }
        }
    }
    if let Some(sets) = m.get_many::<String>("set") {
        for pair in sets {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| ConfigError::UsageError(format!("--set expects KEY=VALUE, got '{pair}'")))?;
            cfg.set(k.trim(), v)?;
        }
    }
    Ok(())
}

fn build_config(cmd: Command, m: &ArgMatches) -> Result<RunConfig, ExperimentError> {
    let mut cfg = match m.get_one::<PathBuf>("config") {
        Some(path) => {
            let cfg = read_config(path)?;
            if cfg.command != cmd {
                return Err(ConfigError::UsageError(format!(
                    "{} holds a [{}] section, expected [{}]",
                    path.display(),
                    cfg.command.section(),
                    cmd.section()
                ))
                .into());
            }
            cfg
        }
        None => RunConfig::with_defaults(cmd),
    };
    apply_overrides(&mut cfg, m, &[schema(cmd), run_schema()])?;
    Ok(cfg)
}

fn execute(cfg: &RunConfig) -> Result<(), ExperimentError> {
    let summary = run_experiment(cfg)?;
    summary.write_outputs(cfg)?;
    match cfg.opt_str("json")? {
        Some(path) => eprintln!("wrote {path}"),
        None => print!("{}", summary.to_json()),
    }
    if let Some(path) = cfg.opt_str("csv")? {
        if summary.csv.is_some() {
            eprintln!("wrote {path}");
        }
    }
    Ok(())
}

fn dispatch(m: &ArgMatches) -> Result<(), ExperimentError> {
    let (cmd, sub) = match m.subcommand() {
        Some(("burgers", s)) => (Command::Burgers, s),
        Some(("lifespan", s)) => (Command::Lifespan, s),
        Some(("john", j)) => match j.subcommand() {
            Some(("solve", s)) => (Command::JohnSolve, s),
            Some(("predict", s)) => (Command::JohnPredict, s),
            Some(("sweep", s)) => (Command::JohnSweep, s),
            _ => unreachable!("subcommand required"),
        },
        Some(("nullcond", n)) => match n.subcommand() {
            Some(("check", s)) => (Command::NullcondCheck, s),
            Some(("aleph", s)) => (Command::NullcondAleph, s),
            Some(("fluid", s)) => (Command::NullcondFluid, s),
            _ => unreachable!("subcommand required"),
        },
        Some(("run", s)) => {
            let mut cfg = read_config(s.get_one::<PathBuf>("file").expect("required"))?;
            apply_overrides(&mut cfg, s, &[run_schema()])?;
            return execute(&cfg);
        }
        _ => unreachable!("handled before dispatch"),
    };
    execute(&build_config(cmd, sub)?)
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    if matches.get_flag("help_config") || matches.subcommand_name() == Some("schema") {
        print!("{}", describe_schema());
        return ExitCode::SUCCESS;
    }
    if matches.subcommand().is_none() {
        let _ = cli().print_help();
        return ExitCode::from(2);
    }
    match dispatch(&matches) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config_for(args: &[&str]) -> Result<RunConfig, ExperimentError> {
        let m = cli().try_get_matches_from(args).unwrap();
        let (_, j) = m.subcommand().unwrap();
        match j.subcommand() {
            Some(("sweep", s)) => build_config(Command::JohnSweep, s),
            _ => build_config(Command::Burgers, j),
        }
    }

    #[test]
    fn cli_is_well_formed() {
        cli().debug_assert();
    }

    #[test]
    fn flags_override_keys() {
        let cfg = config_for(&["shocklab", "burgers", "--profile", "gaussian:2,0,1", "--t-max", "3", "--out", "a.json"])
            .unwrap();
        assert_eq!(cfg.str("profile").unwrap(), "gaussian:2,0,1");
        assert_eq!(cfg.f64("t_max").unwrap(), 3.0);
        assert_eq!(cfg.opt_str("json").unwrap(), Some("a.json"));
    }

    #[test]
    fn negative_values_and_lists_are_accepted() {
        let cfg = config_for(&[
            "shocklab",
            "john",
            "sweep",
            "--lambda",
            "0.08,0.04",
            "--start-time",
            "-0.5",
            "--set",
            "n_u=50",
        ])
        .unwrap();
        assert_eq!(cfg.list("lambda").unwrap(), &[0.08, 0.04]);
        assert_eq!(cfg.f64("start_time").unwrap(), -0.5);
        assert_eq!(cfg.usize("n_u").unwrap(), 50);
    }

    #[test]
    fn bad_values_are_config_errors() {
        let err = config_for(&["shocklab", "burgers", "--n-t", "many"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = config_for(&["shocklab", "burgers", "--set", "nope=1"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
