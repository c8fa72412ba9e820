use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use utility_ghost::balanced::{
    self, BalancedConfig, BalancedGameState, BallMove, BallStrategy, ExactStrategy, MirrorStrategy, RandomBalls,
    Table1Strategy,
};
use utility_ghost::district::{enumerate_maps, ingest_state, seats, DistrictLanguage, Party};
use utility_ghost::engine::{parse_word_list, GameValue, Language, Player, Solver, TrieLanguage};
use utility_ghost::experiments::{self, Mode};
use utility_ghost::service::{self, ServiceConfig};

#[derive(Parser)]
#[command(name = "ghost", version, about = "Utility Ghost redistricting toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a state instance (`.state`) or a word list from the empty prefix.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Party of player 1 (state instances only).
        #[arg(long, value_enum, default_value = "a")]
        first_player: PartyArg,
        #[arg(long)]
        no_memo: bool,
        /// Alpha-beta search; the language must be constant-sum.
        #[arg(long, conflicts_with = "no_memo")]
        alpha_beta: bool,
    },
    /// List the admissible maps of an instance with their seat counts.
    Maps {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Play the (j, m)-balanced balls-and-bins game.
    Balanced {
        #[arg(long)]
        j: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "table1")]
        p1: P1Arg,
        #[arg(long, value_enum, default_value = "mirror")]
        p2: P2Arg,
        /// Seed for random players.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write per-move audit rows as CSV.
        #[arg(long)]
        audit: Option<PathBuf>,
    },
    /// Votes–seats table for a decomino-style instance.
    Fig1 {
        #[arg(long)]
        shape: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Enumerate every distribution instead of sampling.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// New Hampshire case study report.
    Nh {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP play service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "ghost-data")]
        data_dir: PathBuf,
        /// Directory of `.state` files offered by name; defaults to the bundled data.
        #[arg(long)]
        instances_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PartyArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum P1Arg {
    Table1,
    Exact,
    Random,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum P2Arg {
    Mirror,
    Exact,
    Random,
}

type AnyError = Box<dyn std::error::Error>;

fn output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn solve_with<L: Language>(lang: &L, no_memo: bool, alpha_beta: bool) -> Result<(GameValue<L::Symbol>, Vec<(Player, L::Symbol)>), AnyError> {
    let mut solver = if alpha_beta {
        Solver::alpha_beta(lang)?
    } else if no_memo {
        Solver::without_memo()
    } else {
        Solver::new()
    };
    let value = solver.solve(lang, &[])?;
    let line = solver.principal_variation(lang, &[])?;
    log::info!("solver stats: {:?}", solver.stats());
    Ok((value, line))
}

fn solve(instance: &Path, party: PartyArg, no_memo: bool, alpha_beta: bool) -> Result<(), AnyError> {
    if instance.extension().is_some_and(|e| e == "state") {
        let inst = ingest_state(instance)?;
        let maps = enumerate_maps(&inst.graph, &inst.constraints)?;
        let first = match party {
            PartyArg::A => Party::A,
            PartyArg::B => Party::B,
        };
        let lang = DistrictLanguage::new(&maps, inst.graph.atoms(), inst.constraints.k, first);
        let (value, line) = solve_with(&lang, no_memo, alpha_beta)?;
        let name = |p: Party| &inst.parties[if p == Party::A { 0 } else { 1 }];
        println!("value: u1 = {} ({}), u2 = {} ({})", value.u1, name(first), value.u2, name(first.other()));
        for (p, mv) in line {
            println!("{p} {} {}", inst.graph.atoms()[mv.atom].name, mv.district);
        }
    } else {
        let text = std::fs::read_to_string(instance)?;
        let lang = TrieLanguage::new(parse_word_list(&text)?)?;
        let (value, line) = solve_with(&lang, no_memo, alpha_beta)?;
        println!("value: u1 = {}, u2 = {}", value.u1, value.u2);
        for (p, c) in line {
            println!("{p} {c} -");
        }
    }
    Ok(())
}

fn maps(instance: &Path) -> Result<(), AnyError> {
    let inst = ingest_state(instance)?;
    let maps = enumerate_maps(&inst.graph, &inst.constraints)?;
    let atoms = inst.graph.atoms();
    for m in &maps {
        let parts: Vec<String> = m
            .parts()
            .iter()
            .map(|p| format!("{{{}}}", p.iter().map(|&i| atoms[i].name.as_str()).collect::<Vec<_>>().join(",")))
            .collect();
        let s = seats(m, atoms);
        println!("{}  {} {} {} {} ties {}", parts.join(" "), inst.parties[0], s.seats_a, inst.parties[1], s.seats_b, s.ties);
    }
    println!("{} maps", maps.len());
    Ok(())
}

/// Replays a fixed move list.
struct Scripted(std::vec::IntoIter<BallMove>);

impl BallStrategy for Scripted {
    fn choose(&mut self, _: &BalancedGameState, _: Option<BallMove>) -> BallMove {
        self.0.next().expect("script covers the game")
    }
}

fn balanced_cmd(j: usize, m: usize, p1: P1Arg, p2: P2Arg, seed: u64, audit: &Option<PathBuf>) -> Result<(), AnyError> {
    let config = BalancedConfig::new(j, m)?;
    let budget = balanced::DEFAULT_BUDGET;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Against a fixed strategy "exact" means the exact best response.
    let best_response = match (p1, p2) {
        (P1Arg::Table1, P2Arg::Exact) => Some(balanced::best_response_value(config, &mut Table1Strategy, Player::First, budget)?),
        (P1Arg::Exact, P2Arg::Mirror) => Some(balanced::best_response_value(config, &mut MirrorStrategy, Player::Second, budget)?),
        _ => None,
    };
    let out = if let Some(br) = &best_response {
        println!(
            "best response for {}: {} bins ({} positions searched, {} audit checks)",
            br.free_player, br.free_bins, br.states, br.audit.checks
        );
        for v in &br.audit.violations {
            println!("search audit violation: {v}");
        }
        let (a, b): (Vec<_>, Vec<_>) = br.line.iter().partition(|(p, _)| *p == Player::First);
        let mut s1 = Scripted(a.into_iter().map(|(_, mv)| mv).collect::<Vec<_>>().into_iter());
        let mut s2 = Scripted(b.into_iter().map(|(_, mv)| mv).collect::<Vec<_>>().into_iter());
        balanced::play_balanced(config, &mut s1, &mut s2)?
    } else {
        let mut s1: Box<dyn BallStrategy> = match p1 {
            P1Arg::Table1 => Box::new(Table1Strategy),
            P1Arg::Exact => Box::new(ExactStrategy::new(config, budget)?),
            P1Arg::Random => Box::new(RandomBalls::new(ChaCha8Rng::seed_from_u64(rng_seed(&mut rng)))),
        };
        let mut s2: Box<dyn BallStrategy> = match p2 {
            P2Arg::Mirror => Box::new(MirrorStrategy),
            P2Arg::Exact => Box::new(ExactStrategy::new(config, budget)?),
            P2Arg::Random => Box::new(RandomBalls::new(ChaCha8Rng::seed_from_u64(rng_seed(&mut rng)))),
        };
        balanced::play_balanced(config, s1.as_mut(), s2.as_mut())?
    };
    println!("final score: P1 {} bins, P2 {} bins", out.score.0, out.score.1);
    // The f invariants describe Table 1 play, the mirror ones mirror play.
    let relevant: Vec<_> = out
        .audit
        .violations
        .iter()
        .filter(|v| if v.is_mirror() { p2 == P2Arg::Mirror } else { p1 == P1Arg::Table1 })
        .collect();
    for v in &relevant {
        println!("audit violation: {v}");
    }
    println!("{} audit checks, {} relevant violations", out.audit.checks, relevant.len());
    if let Some(path) = audit {
        out.audit.write_csv(File::create(path)?)?;
    }
    Ok(())
}

fn rng_seed(rng: &mut ChaCha8Rng) -> u64 {
    use rand::Rng;
    rng.random()
}

fn run(cli: Cli) -> Result<(), AnyError> {
    match cli.command {
        Command::Solve { instance, first_player, no_memo, alpha_beta } => solve(&instance, first_player, no_memo, alpha_beta),
        Command::Maps { instance } => maps(&instance),
        Command::Balanced { j, m, p1, p2, seed, audit } => balanced_cmd(j, m, p1, p2, seed, &audit),
        Command::Fig1 { shape, trials, seed, exact, out } => {
            let inst = ingest_state(&shape)?;
            let mode = if exact { Mode::Exact } else { Mode::Sampled { trials, seed } };
            let records = experiments::run_decomino(&inst, mode)?;
            experiments::write_records(&records, output(&out)?)?;
            Ok(())
        }
        Command::Nh { data, out } => {
            let report = experiments::run_nh(&ingest_state(&data)?)?;
            write!(output(&out)?, "{report}")?;
            Ok(())
        }
        Command::Serve { port, data_dir, instances_dir } => {
            let instances_dir = instances_dir.unwrap_or_else(|| service::bundled_instances_dir().to_path_buf());
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(service::serve(ServiceConfig { data_dir, instances_dir }, port))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
