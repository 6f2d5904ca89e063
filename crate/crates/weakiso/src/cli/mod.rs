//! Command-line surface: generation, recognition, counting, group search,
//! and theorem-scale verification as batch subcommands.
//!
//! Exit codes: 0 success, 2 invalid parameters or parse failure, 3 input
//! table is not a bijection, 4 verification failure, 5 resource guard.
//! `--json` switches stdout to machine-parseable JSON; output is
//! deterministic for fixed inputs, so repeated runs are byte-identical.

mod verify;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bitword::Dimension;
use crate::classify::classify_with;
use crate::counting::a_profile;
use crate::cubemap::{CubeMap, PreservedSet, SpectrumOptions};
use crate::families::{
    enumerate_family_with_limit, param_space_size, Family, FamilyParams,
    DEFAULT_ENUMERATION_LIMIT,
};
use crate::groupsearch::{aut_group_with_limit, DEFAULT_SEARCH_MAX_N};
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "weakiso",
    version,
    about = "Weak isometries of the Boolean cube: build, classify, count, search, verify"
)]
pub struct Cli {
    /// Emit machine-parseable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for any randomized operation (none of the current subcommands
    /// draw randomness; the seed is accepted for a stable interface).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Unlock verification targets with minutes-scale runtimes.
    #[arg(long, global = true)]
    slow: bool,

    /// Worker threads for spectrum scans.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a map from a family parameter file and write it to a map file.
    Generate(GenerateArgs),
    /// Read a map file and print its classification label.
    Classify(MapFileArgs),
    /// Read a map file and print its preserved-distance set.
    Preserved(MapFileArgs),
    /// Search for the group of all maps preserving the distances in P.
    Aut(AutArgs),
    /// Print counting profiles or exact family sizes.
    Count(CountArgs),
    /// Stream every member of a family to a map file.
    Enumerate(EnumerateArgs),
    /// Check a classification statement against the group-search oracle.
    Verify(verify::VerifyArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Family tag; must match the "family" field of the parameter file.
    family: String,
    /// Parameter file (JSON).
    #[arg(long)]
    params: PathBuf,
    /// Output map file; a .json extension selects the JSON map format.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MapFileArgs {
    /// Map file, text or JSON (detected by content).
    map: PathBuf,
}

#[derive(Args)]
struct AutArgs {
    /// Cube dimension.
    #[arg(long)]
    n: usize,
    /// Required distances, comma separated.
    #[arg(long = "P", value_delimiter = ',', required = true)]
    p: Vec<usize>,
    /// Write the normalized generators as a concatenated text map file.
    #[arg(long)]
    emit_generators: Option<PathBuf>,
    /// Print only the group order.
    #[arg(long)]
    order_only: bool,
}

#[derive(Args)]
struct CountArgs {
    /// Cube dimension.
    #[arg(long)]
    n: usize,
    /// Print the profile A_2, A_4, .. for a p-isometry fixing the zero word.
    #[arg(long, conflicts_with = "family")]
    p: Option<usize>,
    /// Print the number of distinct maps in this family.
    #[arg(long)]
    family: Option<String>,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Family tag.
    #[arg(long)]
    family: String,
    /// Cube dimension.
    #[arg(long)]
    n: usize,
    /// Refuse families larger than this many maps.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    limit: u64,
    /// Write members as a concatenated text map file instead of counting.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Entry point for the binary: parse, run, map errors to exit codes.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Guards overridable through the environment: dimension ceilings for the
/// spectrum scan and the group search.
fn guard_override() -> Option<usize> {
    std::env::var("WEAKISO_MAX_N").ok().and_then(|s| s.parse().ok())
}

fn spectrum_options(threads: usize) -> SpectrumOptions {
    let defaults = SpectrumOptions::default();
    SpectrumOptions {
        max_n: guard_override().unwrap_or(defaults.max_n),
        threads: threads.max(1),
    }
}

fn search_limit() -> usize {
    guard_override().unwrap_or(DEFAULT_SEARCH_MAX_N)
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.cmd {
        Cmd::Generate(args) => cmd_generate(cli, args),
        Cmd::Classify(args) => cmd_classify(cli, args),
        Cmd::Preserved(args) => cmd_preserved(cli, args),
        Cmd::Aut(args) => cmd_aut(cli, args),
        Cmd::Count(args) => cmd_count(cli, args),
        Cmd::Enumerate(args) => cmd_enumerate(cli, args),
        Cmd::Verify(args) => verify::cmd_verify(cli, args),
    }
}

fn read_map(path: &Path) -> Result<CubeMap> {
    let text = fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        CubeMap::from_json(&text)
    } else {
        CubeMap::from_text(&text)
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn cmd_generate(cli: &Cli, args: &GenerateArgs) -> Result<i32> {
    let family: Family = args.family.parse()?;
    let text = fs::read_to_string(&args.params)?;
    let params = FamilyParams::from_json(&text)?;
    if params.family() != family {
        return Err(Error::InvalidParams(format!(
            "parameter file describes family {}, command asked for {}",
            params.family(),
            family
        )));
    }
    let map = params.build()?;
    let is_json = args.out.extension().is_some_and(|e| e == "json");
    let body = if is_json { map.to_json() } else { map.to_text() };
    fs::write(&args.out, body)?;

    #[derive(Serialize)]
    struct Written<'a> {
        family: &'a str,
        n: usize,
        path: &'a Path,
    }
    if cli.json {
        print_json(&Written {
            family: family.as_str(),
            n: map.dimension().get(),
            path: &args.out,
        })?;
    } else {
        println!(
            "wrote {} map (n = {}) to {}",
            family,
            map.dimension().get(),
            args.out.display()
        );
    }
    Ok(0)
}

fn cmd_classify(cli: &Cli, args: &MapFileArgs) -> Result<i32> {
    let map = read_map(&args.map)?;
    let label = classify_with(&map, &spectrum_options(cli.threads))?;
    if cli.json {
        print_json(&label)?;
    } else {
        println!("tag: {}", label.tag);
        let distances = label.spectrum.distances();
        println!(
            "spectrum: {}",
            if distances.is_empty() {
                "(empty)".to_string()
            } else {
                distances.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
            }
        );
        match &label.recovered {
            Some(params) => println!("params: {}", params.to_json()),
            None => println!("params: none recovered"),
        }
    }
    Ok(0)
}

fn cmd_preserved(cli: &Cli, args: &MapFileArgs) -> Result<i32> {
    let map = read_map(&args.map)?;
    let spectrum = map.preserved_distances_with(&spectrum_options(cli.threads))?;
    if cli.json {
        print_json(&spectrum)?;
    } else {
        let distances = spectrum.distances();
        println!(
            "n = {}: preserved distances: {}",
            map.dimension().get(),
            if distances.is_empty() {
                "(none)".to_string()
            } else {
                distances.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
            }
        );
    }
    Ok(0)
}

fn cmd_aut(cli: &Cli, args: &AutArgs) -> Result<i32> {
    let n = Dimension::new(args.n)?;
    let p = PreservedSet::from_distances(n, &args.p)?;
    let group = aut_group_with_limit(n, &p, search_limit())?;
    let order = group.order().to_string();

    let emitted = match &args.emit_generators {
        Some(path) => {
            let mut body = String::new();
            for g in group.generators() {
                body.push_str(&g.to_text());
            }
            fs::write(path, body)?;
            Some(path.as_path())
        }
        None => None,
    };

    if args.order_only {
        if cli.json {
            #[derive(Serialize)]
            struct OrderOnly<'a> {
                order: &'a str,
            }
            print_json(&OrderOnly { order: &order })?;
        } else {
            println!("{order}");
        }
        return Ok(0);
    }

    #[derive(Serialize)]
    struct AutOut<'a> {
        n: usize,
        p: Vec<usize>,
        order: &'a str,
        generators: usize,
        emitted: Option<&'a Path>,
    }
    if cli.json {
        print_json(&AutOut {
            n: args.n,
            p: p.distances(),
            order: &order,
            generators: group.generators().len(),
            emitted,
        })?;
    } else {
        println!(
            "group of all maps preserving {{{}}} on C_{}: order {}, {} generators",
            p.distances().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","),
            args.n,
            order,
            group.generators().len()
        );
        if let Some(path) = emitted {
            println!("generators written to {}", path.display());
        }
    }
    Ok(0)
}

fn cmd_count(cli: &Cli, args: &CountArgs) -> Result<i32> {
    match (&args.p, &args.family) {
        (Some(p), None) => {
            let profile = a_profile(args.n, *p)?;
            let values: Vec<String> = profile.values.iter().map(|v| v.to_string()).collect();
            if cli.json {
                print_json(&values)?;
            } else {
                for (i, v) in values.iter().enumerate() {
                    println!("A_{} = {}", 2 * (i + 1), v);
                }
            }
        }
        (None, Some(family)) => {
            let family: Family = family.parse()?;
            let n = Dimension::new(args.n)?;
            let size = param_space_size(family, n)?.to_string();
            #[derive(Serialize)]
            struct SizeOut<'a> {
                family: &'a str,
                n: usize,
                size: &'a str,
            }
            if cli.json {
                print_json(&SizeOut { family: family.as_str(), n: args.n, size: &size })?;
            } else {
                println!("{} maps at n = {}: {}", family, args.n, size);
            }
        }
        _ => {
            return Err(Error::Parse(
                "pass exactly one of --p (distance profile) or --family (family size)".into(),
            ))
        }
    }
    Ok(0)
}

fn cmd_enumerate(cli: &Cli, args: &EnumerateArgs) -> Result<i32> {
    let family: Family = args.family.parse()?;
    let n = Dimension::new(args.n)?;
    let stream = enumerate_family_with_limit(family, n, args.limit)?;

    let mut count = 0u64;
    match &args.out {
        Some(path) => {
            let mut body = String::new();
            for map in stream {
                body.push_str(&map.to_text());
                count += 1;
            }
            fs::write(path, body)?;
        }
        None => {
            for _ in stream {
                count += 1;
            }
        }
    }

    #[derive(Serialize)]
    struct EnumOut<'a> {
        family: &'a str,
        n: usize,
        count: u64,
        path: Option<&'a Path>,
    }
    if cli.json {
        print_json(&EnumOut {
            family: family.as_str(),
            n: args.n,
            count,
            path: args.out.as_deref(),
        })?;
    } else {
        match &args.out {
            Some(path) => {
                println!("enumerated {} {} maps at n = {} to {}", count, family, args.n, path.display())
            }
            None => println!("enumerated {} {} maps at n = {}", count, family, args.n),
        }
    }
    Ok(0)
}
