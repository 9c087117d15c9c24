use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use misdop::charging::{best_option, corner_polygons, seeing_relation, ChargingOption};
use misdop::dp::{dp_solve, exact_mis, DpParams, EXACT_CAP};
use misdop::extension::{check_extension, maximal_extension};
use misdop::geom::{rat, Point, Rational};
use misdop::instance::{generate, parse, serialize, GenParams};
use misdop::partitioner::{
    build_recursive_partition, parse_certificate, parse_certificate_raw, verify_partition, write_certificate,
    BuildParams, Node, VerifyParams,
};
use misdop::{Error, Instance};

mod svg;

#[derive(Parser)]
#[command(name = "misdop", version, about = "Independent sets of convex polygons with few edge directions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Random instance.
    Generate {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reject polygons meeting an earlier one.
        #[arg(long)]
        independent: bool,
        #[arg(long, default_value_t = 20)]
        coord_range: i64,
        #[arg(long, default_value_t = 4)]
        max_radius: i64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Maximal extension of an independent instance.
    Extend {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Write the event log here.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Accountable polygons per charging option.
    Charge { input: PathBuf },
    /// Recursive partition certificate.
    Partition {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 8)]
        sample_res: u32,
        #[arg(long, default_value_t = 400)]
        max_attempts: usize,
    },
    /// Re-check a certificate against its instance.
    Verify {
        certificate: PathBuf,
        instance: PathBuf,
        #[arg(long, default_value_t = 8)]
        sample_res: u32,
    },
    Solve {
        #[command(subcommand)]
        method: Method,
    },
    /// Draw an instance or a certificate.
    Render {
        input: PathBuf,
        /// Instance to draw under a certificate.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, value_enum, value_delimiter = ',')]
        layers: Vec<Layer>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum Method {
    /// Branch and bound on the conflict graph.
    Exact {
        input: PathBuf,
        #[arg(long, default_value_t = EXACT_CAP)]
        cap: usize,
    },
    /// Container dynamic program.
    Dp {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        grid_level: u32,
        #[arg(long, default_value_t = 1)]
        max_fence_segs: usize,
        #[arg(long, default_value_t = 5)]
        max_cuts: usize,
        #[arg(long, default_value_t = 64)]
        max_boundary: usize,
        #[arg(long, default_value_t = 50_000_000)]
        budget: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Layer {
    Polygons,
    Extended,
    Seeing,
    Fences,
    Cuts,
    Containers,
}

enum Fail {
    /// A report failed or the algorithm gave up.
    Report(String),
    /// Unreadable or malformed input.
    Input(String),
}

type Run = Result<(), Fail>;

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Polygon { .. } | Error::Geom(_) | Error::InvalidCertificate(_) => {
                Fail::Input(e.to_string())
            }
            _ => Fail::Report(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Run {
    fs::write(path, text).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Instance, Fail> {
    parse(&read(path)?).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn cmd_generate(params: GenParams, output: Option<PathBuf>) -> Run {
    let text = serialize(&generate(&params)?);
    match output {
        Some(p) => write(&p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_extend(input: &Path, output: &Path, log: Option<PathBuf>) -> Run {
    let inst = load(input)?;
    inst.check_independent()?;
    let res = maximal_extension(&inst)?;
    write(output, &serialize(&res.instance))?;
    if let Some(p) = log {
        let mut text = String::new();
        for e in &res.log {
            let _ = writeln!(text, "{e}");
        }
        write(&p, &text)?;
    }
    let rep = check_extension(&res);
    let word = |b: bool| if b { "PASS" } else { "FAIL" };
    println!("E1 independent {}", word(rep.independent));
    println!("E1 on-grid {} max_level={}", word(rep.on_grid), rep.max_level);
    println!("E2 contained {}", word(rep.contained));
    println!("E4 touching {}", word(rep.touching));
    println!("events={} fallbacks={}", res.log.len(), res.fallbacks);
    for f in &rep.failures {
        eprintln!("{f}");
    }
    if rep.ok() {
        Ok(())
    } else {
        Err(Fail::Report("extension report failed".into()))
    }
}

fn cmd_charge(input: &Path) -> Run {
    let inst = load(input)?;
    inst.check_independent()?;
    let z = corner_polygons(&inst);
    let bound = (3 * (inst.len() - z.len())).div_ceil(4 * inst.d());
    println!("option\tcount\tbound\tsatisfied");
    for opt in ChargingOption::all(&inst.ds) {
        let count = misdop::charging::accountable(&inst.polygons, &z, opt).len();
        println!("{opt}\t{count}\t{bound}\t{}", count >= bound);
    }
    let rep = best_option(&inst, &z)?;
    println!("chosen\t{}", rep.chosen);
    Ok(())
}

fn cmd_partition(input: &Path, output: &Path, params: BuildParams) -> Run {
    let inst = load(input)?;
    let rp = build_recursive_partition(&inst, &params)?;
    write(output, &write_certificate(&rp))?;
    let depth = (0..rp.nodes.len()).map(|k| rp.depth(k)).max().unwrap_or(0);
    println!("option={} nodes={} depth={depth}", rp.option, rp.nodes.len());
    let s = rp.summary();
    println!("{s}");
    if s.ledger_ok() && s.half_ok() && s.ratio_ok(inst.len()) {
        Ok(())
    } else {
        Err(Fail::Report("bound not met".into()))
    }
}

fn cmd_verify(cert: &Path, instance: &Path, sample_res: u32) -> Run {
    let inst = load(instance)?;
    let rp = parse_certificate(&read(cert)?, &inst).map_err(|e| Fail::Input(format!("{}: {e}", cert.display())))?;
    let rep = verify_partition(&rp, &inst, &VerifyParams { sample_res });
    println!("{rep}");
    if rep.passed() {
        Ok(())
    } else {
        Err(Fail::Report(format!("{} failed checks", rep.failures.len())))
    }
}

fn print_solution(inst: &Instance, ids: &[usize]) -> Run {
    println!("{}", ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" "));
    let k = ids.len();
    let ratio = if inst.len() <= EXACT_CAP && k > 0 {
        let best = exact_mis(inst, EXACT_CAP)?.len();
        let r = Rational::new(best.into(), k.into());
        format!("{}/{}", r.numer(), r.denom())
    } else {
        "n/a".to_string()
    };
    println!("value={k} ratio_vs_exact={ratio}");
    Ok(())
}

fn cmd_solve(method: Method) -> Run {
    match method {
        Method::Exact { input, cap } => {
            let inst = load(&input)?;
            let ids = exact_mis(&inst, cap)?;
            print_solution(&inst, &ids)
        }
        Method::Dp { input, grid_level, max_fence_segs, max_cuts, max_boundary, budget } => {
            let inst = load(&input)?;
            let params = DpParams { grid_level, max_fence_segs, max_cuts, max_boundary, budget };
            let res = dp_solve(&inst, &params)?;
            eprintln!("containers={} work={}", res.cells, res.work);
            print_solution(&inst, &res.ids)
        }
    }
}

fn centroid(pts: &[Point]) -> Point {
    let k = rat(pts.len() as i64);
    let x: Rational = pts.iter().map(|p| p.x.clone()).sum();
    let y: Rational = pts.iter().map(|p| p.y.clone()).sum();
    Point::new(x / &k, y / k)
}

fn draw_instance(out: &mut svg::Svg, inst: &Instance, layers: &[Layer], option: ChargingOption) -> Run {
    if layers.contains(&Layer::Extended) {
        inst.check_independent()?;
        let res = maximal_extension(inst)?;
        out.open("extended");
        for p in &res.instance.polygons {
            out.polygon("extended", &p.vertices(), "none", "#888888");
        }
        out.close();
    }
    if layers.contains(&Layer::Polygons) {
        out.open("polygons");
        out.polygon("bbox", &inst.bbox.vertices(), "none", "#000000");
        for p in &inst.polygons {
            out.polygon("polygon", &p.vertices(), "#9ecae1", "#08519c");
        }
        out.close();
    }
    if layers.contains(&Layer::Seeing) {
        let rel = seeing_relation(&inst.polygons, option);
        out.open("seeing");
        for (p, seen) in rel.seen.iter().enumerate() {
            for &q in seen {
                let (a, b) = (centroid(&inst.polygons[p].vertices()), centroid(&inst.polygons[q].vertices()));
                out.line("seeing", &a, &b, "#d62728", true);
            }
        }
        out.close();
    }
    Ok(())
}

fn depths(nodes: &[Node]) -> Vec<usize> {
    let mut depth = vec![0; nodes.len()];
    for (k, n) in nodes.iter().enumerate() {
        if let Some(p) = n.parent.filter(|&p| p < k) {
            depth[k] = depth[p] + 1;
        }
    }
    depth
}

fn cmd_render(input: &Path, instance: Option<PathBuf>, mut layers: Vec<Layer>, output: &Path) -> Run {
    let text = read(input)?;
    let mut out = svg::Svg::new();
    if text.trim_start().starts_with("misdop-partition") {
        let (option, nodes) =
            parse_certificate_raw(&text).map_err(|e| Fail::Input(format!("{}: {e}", input.display())))?;
        if layers.is_empty() {
            layers = vec![Layer::Containers, Layer::Fences, Layer::Cuts];
        }
        if let Some(p) = instance {
            draw_instance(&mut out, &load(&p)?, &layers, option)?;
        }
        let depth = depths(&nodes);
        if layers.contains(&Layer::Containers) {
            let top = depth.iter().copied().max().unwrap_or(0);
            for level in 0..=top {
                out.open(&format!("containers depth-{level}"));
                for (n, _) in nodes.iter().zip(&depth).filter(|(_, &d)| d == level) {
                    out.polygon("container", &n.container.cycle(), "none", "#31a354");
                }
                out.close();
            }
        }
        if layers.contains(&Layer::Fences) {
            out.open("fences");
            for n in &nodes {
                for f in &n.container.fences {
                    out.polyline("fence", f.chain.points(), "#3182bd");
                }
            }
            out.close();
        }
        if layers.contains(&Layer::Cuts) {
            out.open("cuts");
            for n in &nodes {
                for c in &n.container.cuts {
                    out.line("cut", &c.seg.tail, &c.seg.head, "#e6550d", false);
                }
            }
            out.close();
        }
    } else {
        let inst = parse(&text).map_err(|e| Fail::Input(format!("{}: {e}", input.display())))?;
        if layers.is_empty() {
            layers = vec![Layer::Polygons];
        }
        let z = corner_polygons(&inst);
        let option = best_option(&inst, &z).map(|r| r.chosen).unwrap_or(ChargingOption::V1_TAIL);
        draw_instance(&mut out, &inst, &layers, option)?;
    }
    write(output, &out.finish())
}

fn run(cli: Cli) -> Run {
    match cli.cmd {
        Cmd::Generate { d, n, seed, independent, coord_range, max_radius, output } => {
            let params = GenParams { coord_range, max_radius, independent, ..GenParams::new(d, n, seed) };
            cmd_generate(params, output)
        }
        Cmd::Extend { input, output, log } => cmd_extend(&input, &output, log),
        Cmd::Charge { input } => cmd_charge(&input),
        Cmd::Partition { input, output, sample_res, max_attempts } => {
            cmd_partition(&input, &output, BuildParams { sample_res, max_attempts })
        }
        Cmd::Verify { certificate, instance, sample_res } => cmd_verify(&certificate, &instance, sample_res),
        Cmd::Solve { method } => cmd_solve(method),
        Cmd::Render { input, instance, layers, output } => cmd_render(&input, instance, layers, &output),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Report(msg)) => {
            eprintln!("misdop: {msg}");
            ExitCode::from(1)
        }
        Err(Fail::Input(msg)) => {
            eprintln!("misdop: {msg}");
            ExitCode::from(2)
        }
    }
}
