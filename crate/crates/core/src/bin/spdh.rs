use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spdh_core::action::{CycleAction, GadlpMethod};
use spdh_core::formats::{self, PlatformSpec};
use spdh_core::orbit::{self, PeriodFinder, QuantumRunConfig};
use spdh_core::platform::{validate_platform, Platform};
use spdh_core::protocol::{self, InstanceMode, KeyPair, ProfileMethod, PublicParams, DEFAULT_ORBIT_CAP};
use spdh_core::{Error, Pair};

#[derive(Parser)]
#[command(name = "spdh", version, about = "Semidirect product key exchange and SDLP attack toolkit")]
struct Cli {
    /// RNG seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Orbit bound N for the simulated quantum path.
    #[arg(long, global = true)]
    bound: Option<u64>,
    /// Method selector; its meaning depends on the command.
    #[arg(long, global = true)]
    method: Option<String>,
    /// Retry budget for simulated period finding.
    #[arg(long, global = true, default_value_t = 20)]
    retries: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PlatformArgs {
    /// Platform file (Cayley table file or matrix config line).
    #[arg(long)]
    platform: PathBuf,
    /// Base element as hex, overriding any `g=` in the platform file.
    #[arg(long)]
    g: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a key pair.
    Keygen {
        #[command(flatten)]
        platform: PlatformArgs,
        /// Use this secret instead of drawing one.
        #[arg(long)]
        secret: Option<u64>,
    },
    /// Derive the shared key from a secret and the peer's public value.
    Derive {
        #[command(flatten)]
        platform: PlatformArgs,
        #[arg(long)]
        secret: u64,
        /// Own public value, for the commutativity check.
        #[arg(long)]
        public: Option<String>,
        #[arg(long)]
        peer: String,
    },
    /// Recover the shared key from a transcript (--method brent|qsim).
    Attack {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long, value_enum, default_value_t = GadlpArg::Bsgs)]
        gadlp: GadlpArg,
    },
    /// Generate SDLP instances or exchange transcripts.
    GenInstance {
        #[command(flatten)]
        platform: PlatformArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Planted)]
        mode: ModeArg,
        /// Include the planted answers in the output.
        #[arg(long)]
        with_planted: bool,
        #[arg(long, default_value_t = 1)]
        count: u32,
        /// Output path; with --count > 1 a numeric suffix is appended.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an SDLP instance file (--method brent|qsim).
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = GadlpArg::Bsgs)]
        gadlp: GadlpArg,
    },
    #[command(subcommand)]
    Orbit(OrbitCommand),
    #[command(subcommand)]
    Gadlp(GadlpCommand),
    #[command(subcommand)]
    Action(ActionCommand),
    #[command(name = "platform", subcommand)]
    PlatformCmd(PlatformCommand),
}

#[derive(Subcommand)]
enum OrbitCommand {
    /// Compute (n, r) (--method brute|brent|qsim) and print a profile file.
    Profile {
        #[command(flatten)]
        platform: PlatformArgs,
        /// Enumeration cap for the brute-force method.
        #[arg(long, default_value_t = 1 << 24)]
        cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GadlpCommand {
    /// Find k with k ⊛ x = y (--method brute|bsgs|hidden-shift).
    Solve {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
}

#[derive(Subcommand)]
enum ActionCommand {
    /// Check the action axioms on the cycle of a profile file.
    Verify {
        #[arg(long)]
        profile: PathBuf,
    },
}

#[derive(Subcommand)]
enum PlatformCommand {
    /// Check the monoid and homomorphism laws.
    Validate {
        #[arg(long)]
        platform: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GadlpArg {
    Brute,
    Bsgs,
    HiddenShift,
}

impl From<GadlpArg> for GadlpMethod {
    fn from(a: GadlpArg) -> Self {
        match a {
            GadlpArg::Brute => GadlpMethod::Brute,
            GadlpArg::Bsgs => GadlpMethod::Bsgs,
            GadlpArg::HiddenShift => GadlpMethod::HiddenShift,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Protocol,
    Planted,
}

/// Command failure: solver failures exit 1, everything else 2.
enum Failure {
    Solver(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_solver_failure() {
            Failure::Solver(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_pair(args: &PlatformArgs) -> Result<Pair, Failure> {
    let spec: PlatformSpec = formats::parse_platform_file(&read(&args.platform)?)?;
    let g = args.g.as_deref().map(|h| spec.platform.element_from_hex(h)).transpose()?;
    Ok(spec.pair(g)?)
}

fn warn_if_commutative(platform: &Platform) {
    let commutative = match platform {
        Platform::Matrix(m) => m.dim() == 1 || platform.is_commutative() == Some(true),
        Platform::Cayley(_) => platform.is_commutative() == Some(true),
    };
    if commutative {
        eprintln!("warning: platform is commutative; A·B equals the shared key");
    }
}

fn params(pair: Pair) -> Result<PublicParams, Failure> {
    Ok(PublicParams::derive(pair, DEFAULT_ORBIT_CAP)?)
}

fn profile_method(cli: &Cli) -> Result<ProfileMethod, Failure> {
    match cli.method.as_deref().unwrap_or("brent") {
        "brent" => Ok(ProfileMethod::Brent),
        "qsim" => {
            let bound = cli.bound.ok_or_else(|| Failure::Input("--method qsim needs --bound N".into()))?;
            let config = QuantumRunConfig::for_bound(bound, cli.retries, cli.seed)?;
            Ok(ProfileMethod::Quantum { config, bound })
        }
        other => Err(Failure::Input(format!("unknown profile method `{other}` (brent|qsim)"))),
    }
}

fn print_traces(solution: &protocol::SdlpSolution) {
    for t in &solution.traces {
        eprintln!("{t}");
    }
}

fn run(cli: &Cli) -> CmdResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    match &cli.command {
        Command::Keygen { platform, secret } => {
            let pair = load_pair(platform)?;
            warn_if_commutative(pair.platform());
            let p = params(pair)?;
            let kp = match secret {
                Some(x) => KeyPair::from_secret(&p, *x)?,
                None => protocol::spdke_keygen(&p, &mut rng),
            };
            println!("N={}\nx={}\nA={}", p.bound(), kp.secret(), kp.public().to_hex());
        }
        Command::Derive { platform, secret, public, peer } => {
            let pair = load_pair(platform)?;
            warn_if_commutative(pair.platform());
            let p = params(pair)?;
            let kp = KeyPair::from_secret(&p, *secret)?;
            let peer = p.pair().platform().element_from_hex(peer)?;
            let key = protocol::spdke_derive(p.pair(), &kp, &peer)?;
            if let Some(public) = public {
                let own = p.pair().platform().element_from_hex(public)?;
                if protocol::product_leaks_key(p.pair(), &own, &peer, &key)? {
                    eprintln!("warning: A·B equals the shared key");
                }
            }
            println!("K={}", key.to_hex());
        }
        Command::Attack { transcript, gadlp } => {
            let t = formats::parse_transcript(&read(transcript)?)?;
            let t = protocol::Transcript { planted: None, ..t };
            let out = protocol::attack_transcript(&t, profile_method(cli)?, (*gadlp).into())?;
            print_traces(&out.solution);
            println!("x={}\nK={}", out.solution.x, out.key.to_hex());
        }
        Command::GenInstance { platform, mode, with_planted, count, out } => {
            let pair = load_pair(platform)?;
            warn_if_commutative(pair.platform());
            let p = params(pair)?;
            let mode = match mode {
                ModeArg::Protocol => InstanceMode::Protocol,
                ModeArg::Planted => InstanceMode::Planted,
            };
            for i in 0..*count {
                let g = protocol::gen_instance(&p, &mut rng, mode);
                let text = match g.transcript {
                    Some(mut t) => {
                        if !with_planted {
                            t.planted = None;
                        }
                        formats::write_transcript(&t)
                    }
                    None => formats::write_instance(&g.instance, *with_planted),
                };
                let path = out.as_ref().map(|o| {
                    if *count > 1 {
                        PathBuf::from(format!("{}.{i}", o.display()))
                    } else {
                        o.clone()
                    }
                });
                write_out(path.as_deref(), &text)?;
            }
        }
        Command::Solve { instance, gadlp } => {
            let inst = formats::parse_instance(&read(instance)?)?;
            let inst = protocol::SdlpInstance { planted: None, ..inst };
            let sol = protocol::solve_sdlp(&inst, profile_method(cli)?, (*gadlp).into())?;
            print_traces(&sol);
            let branch = match sol.branch {
                protocol::Branch::Tail => "tail",
                protocol::Branch::Cycle => "cycle",
            };
            println!(
                "x={}\nn={}\nr={}\nbranch={branch}\ngadlp_queries={}\nprofile_attempts={}",
                sol.x, sol.profile.n, sol.profile.r, sol.gadlp_queries, sol.profile_attempts
            );
        }
        Command::Orbit(OrbitCommand::Profile { platform, cap, out }) => {
            let pair = load_pair(platform)?;
            let profile = match cli.method.as_deref().unwrap_or("brent") {
                "brute" => orbit::brute_force_profile(&pair, *cap)?,
                "brent" => orbit::brent_profile(&pair),
                "qsim" => {
                    let bound = cli.bound.ok_or_else(|| Failure::Input("--method qsim needs --bound N".into()))?;
                    let config = QuantumRunConfig::for_bound(bound, cli.retries, cli.seed)?;
                    let finder = PeriodFinder::new(&pair, config, bound)?;
                    let run = finder.recover()?;
                    for t in &run.traces {
                        eprintln!("{t}");
                    }
                    let r = run.period.ok_or(Error::PeriodRecoveryFailed { attempts: run.attempts() })?;
                    let n = orbit::binary_search_index(&pair, 1, config.register_size(), r)?.index;
                    orbit::OrbitProfile { n, r, cycle_anchor: pair.s_eval(n)? }
                }
                other => return Err(Failure::Input(format!("unknown orbit method `{other}` (brute|brent|qsim)"))),
            };
            write_out(out.as_deref(), &formats::write_profile(&pair, &profile))?;
        }
        Command::Gadlp(GadlpCommand::Solve { profile, x, y }) => {
            let (pair, profile) = formats::parse_profile(&read(profile)?)?;
            let method: GadlpMethod = cli.method.as_deref().unwrap_or("bsgs").parse()?;
            let action = CycleAction::new(pair, profile)?;
            let platform = action.pair().platform();
            let x = action.point(platform.element_from_hex(x)?)?;
            let y = action.point(platform.element_from_hex(y)?)?;
            let k = action.gadlp(method, &x, &y)?;
            println!("k={}\nr={}", k.value(), k.modulus());
        }
        Command::Action(ActionCommand::Verify { profile }) => {
            let (pair, profile) = formats::parse_profile(&read(profile)?)?;
            let report = CycleAction::new(pair, profile)?.verify()?;
            print!("{report}");
            if !report.passed() {
                return Err(Failure::Input("action axioms violated".into()));
            }
        }
        Command::PlatformCmd(PlatformCommand::Validate { platform, samples }) => {
            let spec = formats::parse_platform_file(&read(platform)?)?;
            let report = validate_platform(&spec.platform, &spec.endo, *samples, &mut rng);
            print!("{report}");
            if !report.passed() {
                return Err(Failure::Input("platform laws violated".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
