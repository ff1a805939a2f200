//! Thin command-line driver over the library: load a model file, then run,
//! check, export or demo. Exit codes: 0 success (property holds), 1 load or
//! runtime error, 2 property violated (witness printed).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kbt::analysis::{check_equivalence, check_reactive, count_switches, SearchMode};
use kbt::asm::{trace_asm, Arch};
use kbt::dot::{dt_to_dot, fsm_to_dot, tree_to_dot};
use kbt::dsl::load_model;
use kbt::input::History;
use kbt::worlds::{scenarios, simulate, ControllerStack};

#[derive(Parser)]
#[command(name = "kbt", about = "Run and analyze action-selection architectures")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate a controller stack in a world from a model file.
    Run {
        #[arg(long)]
        model: PathBuf,
        /// Stack name (a bare architecture name works as a one-layer stack).
        #[arg(long)]
        stack: String,
        #[arg(long)]
        world: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the trace here instead of stdout.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Search for a pair of histories proving history-dependence.
    CheckReactive {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        asm: String,
        #[arg(long)]
        alphabet: String,
        #[arg(long)]
        max_len: usize,
        /// Sample this many random histories instead of exhausting.
        #[arg(long)]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare two architectures' selections over bounded histories.
    Equiv {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        alphabet: String,
        #[arg(long)]
        max_len: usize,
    },
    /// Export an architecture as Graphviz DOT.
    ExportDot {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        asm: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a built-in scenario and print its summary.
    Demo {
        #[arg(long, value_parser = ["chattering", "wall-follow", "door"])]
        scenario: String,
    },
}

fn fmt_history(h: &History) -> String {
    h.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn load(path: &PathBuf) -> kbt::Result<kbt::dsl::Model> {
    let text = std::fs::read_to_string(path)?;
    load_model(&text)
}

fn run(cli: Cli) -> kbt::Result<ExitCode> {
    match cli.cmd {
        Cmd::Run { model, stack, world, steps, seed, trace_out } => {
            let m = load(&model)?;
            let stack = m.stack(&stack)?;
            let mut w = m.make_world(&world)?;
            let trace = simulate(w.as_mut(), &stack, steps, seed)?;
            match trace_out {
                Some(p) => std::fs::write(p, trace.to_text())?,
                None => print!("{}", trace.to_text()),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::CheckReactive { model, asm, alphabet, max_len, sample, seed } => {
            let m = load(&model)?;
            let arch = m.arch(&asm)?;
            let a = m.alphabet(&alphabet)?;
            let mode = match sample {
                Some(count) => SearchMode::Sample { count, seed },
                None => SearchMode::default(),
            };
            let report = check_reactive(arch, a, max_len, mode)?;
            match report.witness {
                None => {
                    println!("reactive: no witness up to length {max_len}");
                    Ok(ExitCode::SUCCESS)
                }
                Some(w) => {
                    println!("non-reactive: same final input, different actions");
                    println!("  history A: {}", fmt_history(&w.history_a));
                    println!("  history B: {}", fmt_history(&w.history_b));
                    println!("  selects A: {}", w.selection_a);
                    println!("  selects B: {}", w.selection_b);
                    Ok(ExitCode::from(2))
                }
            }
        }
        Cmd::Equiv { model, a, b, alphabet, max_len } => {
            let m = load(&model)?;
            let (ma, mb) = (m.arch(&a)?, m.arch(&b)?);
            let alpha = m.alphabet(&alphabet)?;
            let report = check_equivalence(ma, mb, alpha, max_len, SearchMode::default())?;
            match report.witness {
                None => {
                    println!("equivalent: selections agree on all histories up to length {max_len}");
                    Ok(ExitCode::SUCCESS)
                }
                Some(w) => {
                    println!("distinguished:");
                    println!("  history:   {}", fmt_history(&w.history));
                    println!("  {a} selects: {}", w.selection_a);
                    println!("  {b} selects: {}", w.selection_b);
                    Ok(ExitCode::from(2))
                }
            }
        }
        Cmd::ExportDot { model, asm, out } => {
            let m = load(&model)?;
            let dot = match m.arch(&asm)? {
                Arch::Tree(t) => tree_to_dot(t),
                Arch::Fsm(f) => fsm_to_dot(f),
                Arch::Dt(d) => dt_to_dot(d),
                Arch::Tr(tr) => {
                    let t = kbt::tree::tr_to_kbt(tr)?;
                    tree_to_dot(&t)
                }
                Arch::Blackboard(b) => match b.inner.as_ref() {
                    Arch::Tree(t) => tree_to_dot(t),
                    Arch::Fsm(f) => fsm_to_dot(f),
                    Arch::Dt(d) => dt_to_dot(d),
                    _ => return Err(kbt::Error::UnknownName(asm)),
                },
            };
            std::fs::write(out, dot)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Demo { scenario } => {
            demo(&scenario)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn demo(scenario: &str) -> kbt::Result<()> {
    match scenario {
        "chattering" => {
            let h = scenarios::oscillating_battery_history(40);
            let plain = trace_asm(&Arch::Tree(scenarios::recharge_bt()), &h)?;
            let layered = trace_asm(&Arch::Fsm(scenarios::recharge_fsm()), &h)?;
            println!("battery oscillating 9% / 11% for {} steps", h.len());
            println!("plain tree switches:   {}", count_switches(&plain));
            println!("layered fsm switches:  {}", count_switches(&layered));
        }
        "wall-follow" => {
            for (name, pick) in [("reactive", 1usize), ("fsm", 2)] {
                let (mut w, reactive, fsm) = scenarios::wall_follow_scenario();
                let arch = if pick == 1 { reactive } else { fsm };
                let stack = ControllerStack::single("Nav", arch);
                let trace = simulate(&mut w, &stack, 40, None)?;
                let poses: Vec<&str> =
                    trace.steps.iter().map(|s| s.summary.as_str()).collect();
                let start = "{pos=(4,7) heading=E}";
                let returned = trace
                    .steps
                    .iter()
                    .position(|s| s.step > 0 && s.summary == start);
                println!("{name} agent, 40 steps:");
                println!("  final: {}", poses.last().unwrap());
                match returned {
                    Some(i) => println!("  returned to start pose at step {i}"),
                    None => println!("  never returned to start pose"),
                }
            }
        }
        "door" => {
            let (mut w, handling, _) = scenarios::door_scenario();
            let stack = ControllerStack::single("Door", Arch::Tree(handling));
            let t = simulate(&mut w, &stack, 3, None)?;
            println!("three-valued tree (handles Unknown):");
            print!("{}", t.to_text());
            let (mut w, _, ignoring) = scenarios::door_scenario();
            let stack = ControllerStack::single("Door", Arch::Tree(ignoring));
            let t = simulate(&mut w, &stack, 3, None)?;
            println!("two-valued tree (Unknown acts as Running):");
            print!("{}", t.to_text());
        }
        _ => unreachable!("clap validates the scenario name"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
