//! The `ordelab` command line. [`run`] parses arguments, dispatches and
//! returns the exit status: 0 on success, 1 on a computed negative answer,
//! 2 when the input is bad or the computation could not finish.

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;

use ordelab_core::ball::{enumerate_ball, Ball};
use ordelab_core::catalog::{self, CatalogEntry, CATALOG};
use ordelab_core::certify::{abelianize, certify_surjection, pipeline_check, PipelineBounds, Verdict};
use ordelab_core::dynamics::{
    build_action, build_affine_action, convex_envelope, cofinal_test, find_crossing, lemma_chain, nesting_report,
    recurrence_check, Cofinality, CrossingOutcome, OrderedAction, Point, Recurrence,
};
use ordelab_core::orders::{
    cone_to_coset_order, search_cones, verify_relative_cone, Constraints, RelativeOrder, SearchOptions, Sign,
    SignAssignment,
};
use ordelab_core::realization::{realize, verify_realization, RealizationReport};
use ordelab_core::{parse_presentation, parse_rules, parse_word, ConfluenceReport, GroupPresentation, RewritingSystem, Word};

#[derive(Parser, Debug)]
#[command(name = "ordelab", version, about = "Relative orders on finitely presented groups")]
struct Cli {
    /// Output style: `human`, or `records` for key<TAB>value lines
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    /// Worker threads for search loops; results do not depend on it
    #[arg(long, global = true, default_value_t = 1)]
    parallelism: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Records,
}

#[derive(Args, Debug)]
struct GroupArgs {
    /// Catalog group (see `ordelab catalog`)
    #[arg(long, conflicts_with = "presentation")]
    preset: Option<String>,

    /// Presentation file `< a, b | ... >`
    #[arg(long)]
    presentation: Option<PathBuf>,

    /// Confluent rewriting system for the presentation file
    #[arg(long, requires = "presentation")]
    rules: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConeArgs {
    /// Radius of the Cayley ball
    #[arg(long, default_value_t = 2)]
    radius: usize,

    /// Cone file of `element<TAB>sign` lines
    #[arg(long, conflicts_with = "index")]
    cone: Option<PathBuf>,

    /// Use the k-th cone of the search instead of a file
    #[arg(long)]
    index: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a presentation, check its rules and normalize words
    Parse {
        #[command(flatten)]
        group: GroupArgs,
        /// Word to normalize; repeatable
        #[arg(long)]
        word: Vec<String>,
    },
    /// Enumerate the Cayley ball
    Ball {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
    /// Search truncated relative cones
    Cones {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        /// Force an element into C; repeatable
        #[arg(long)]
        force_star: Vec<String>,
        /// Force an element positive; repeatable
        #[arg(long)]
        force_pos: Vec<String>,
        /// Force an element negative; repeatable
        #[arg(long)]
        force_neg: Vec<String>,
        /// Only the identity of the ball may lie in C
        #[arg(long)]
        trivial_c: bool,
        #[arg(long, default_value_t = 1000)]
        limit: usize,
        /// Give up after this many search nodes
        #[arg(long)]
        node_budget: Option<u64>,
        /// Print only the k-th cone
        #[arg(long)]
        index: Option<usize>,
    },
    /// Realize a cone by piecewise-linear maps of the line
    Realize {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        cone: ConeArgs,
    },
    /// Search crossings of the affine model or of a coset action
    Crossings {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        cone: ConeArgs,
        #[arg(long, default_value_t = 2)]
        word_bound: usize,
        #[arg(long, default_value_t = 8)]
        power_bound: usize,
    },
    /// Check a chain for recurrence under powers of h
    Recurrence {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        cone: ConeArgs,
        /// Comma-separated increasing chain, e.g. "id,a,a^2"
        #[arg(long)]
        chain: String,
        #[arg(long)]
        h: String,
        #[arg(long, default_value_t = 16)]
        bound: usize,
    },
    /// Convex envelope of an orbit, cofinality, nesting of envelopes
    Envelope {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        cone: ConeArgs,
        #[arg(long)]
        g: String,
        /// Orbit start as a rational n/d; defaults to the base point
        #[arg(long)]
        x: Option<String>,
        #[arg(long, default_value_t = 8)]
        bound: usize,
        /// Also classify all pairs of envelopes
        #[arg(long)]
        nesting: bool,
        #[arg(long, default_value_t = 1)]
        word_bound: usize,
    },
    /// Certify whether the group surjects onto Z
    Certify {
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Run search, recurrence, crossings and certification together
    Pipeline {
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        /// Power bound for crossings and recurrence
        #[arg(long, default_value_t = 8)]
        bounds: usize,
        #[arg(long, default_value_t = 2)]
        word_bound: usize,
        #[arg(long, default_value_t = 1000)]
        limit: usize,
        #[arg(long)]
        node_budget: Option<u64>,
        /// Mark the run exploratory and cap the search
        #[arg(long)]
        exploratory: bool,
    },
    /// List the built-in groups
    Catalog {
        /// Show one entry in full
        #[arg(long)]
        show: Option<String>,
    },
}

/// Node cap for exploratory pipeline runs without an explicit budget.
const EXPLORATORY_BUDGET: u64 = 500_000;

/// Buffered command output in either format.
struct Report {
    format: Format,
    text: String,
}

impl Report {
    fn field(&mut self, key: &str, value: impl Display) {
        let line = match self.format {
            Format::Human => format!("{key}: {value}\n"),
            Format::Records => format!("{key}\t{value}\n"),
        };
        self.text.push_str(&line);
    }

    fn raw(&mut self, text: &str) {
        self.text.push_str(text);
    }
}

struct Group {
    name: String,
    presentation: GroupPresentation,
    rws: Option<RewritingSystem>,
    entry: Option<&'static CatalogEntry>,
}

impl Group {
    fn rws(&self) -> Result<&RewritingSystem> {
        self.rws.as_ref().ok_or_else(|| anyhow!("this command needs --rules FILE with --presentation"))
    }

    fn word(&self, text: &str) -> Result<Word> {
        parse_word(text.trim(), &self.presentation.alphabet).with_context(|| format!("bad word `{text}`"))
    }

    fn show(&self, w: &Word) -> String {
        w.display(&self.presentation.alphabet).to_string()
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_group(args: &GroupArgs) -> Result<Group> {
    if let Some(name) = &args.preset {
        let entry = catalog::lookup(name).ok_or_else(|| anyhow!("unknown preset `{name}`; see `ordelab catalog`"))?;
        return Ok(Group {
            name: entry.name.to_string(),
            presentation: entry.presentation(),
            rws: Some(entry.rewriting_system()),
            entry: Some(entry),
        });
    }
    let Some(path) = &args.presentation else { bail!("give --preset NAME or --presentation FILE") };
    let presentation = parse_presentation(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    let rws = match &args.rules {
        Some(r) => Some(parse_rules(&read(r)?, &presentation.alphabet).with_context(|| format!("in {}", r.display()))?),
        None => None,
    };
    Ok(Group { name: path.display().to_string(), presentation, rws, entry: None })
}

fn ball(group: &Group, radius: usize) -> Result<Arc<Ball>> {
    Ok(Arc::new(enumerate_ball(group.rws()?, radius)?))
}

/// The cone named by `--cone` or `--index`, with a label for the report.
fn select_cone(group: &Group, args: &ConeArgs, parallel: bool) -> Result<(String, SignAssignment)> {
    let ball = ball(group, args.radius)?;
    if let Some(path) = &args.cone {
        let phi = SignAssignment::from_text(ball, &read(path)?).with_context(|| format!("in {}", path.display()))?;
        if let Err(v) = verify_relative_cone(&phi) {
            bail!("{} is not a relative cone: {} violation at {:?}", path.display(), v.kind, v.witnesses);
        }
        return Ok((path.display().to_string(), phi));
    }
    let k = args.index.unwrap_or(0);
    let options = SearchOptions { limit: k + 1, parallel, ..SearchOptions::default() };
    let out = search_cones(&ball, &Constraints::default(), &options);
    let n = out.cones.len();
    let phi = out.cones.into_iter().nth(k).ok_or_else(|| anyhow!("cone {k} requested but the search found {n}"))?;
    Ok((k.to_string(), phi))
}

/// The affine model when the preset has one and no cone was named,
/// otherwise the left action on the cosets of the chosen cone.
fn action(group: &Group, args: &ConeArgs, parallel: bool, report: &mut Report) -> Result<OrderedAction> {
    let affine = group.entry.and_then(CatalogEntry::affine_model);
    if let (Some(model), None, None) = (affine, &args.cone, args.index) {
        report.field("model", "affine");
        return Ok(build_affine_action(model, group.rws()?.clone(), args.radius)?);
    }
    let (label, phi) = select_cone(group, args, parallel)?;
    let order = cone_to_coset_order(&phi).map_err(|e| anyhow!("cone {label} has no coset order: {e}"))?;
    report.field("model", "cosets");
    report.field("cone", label);
    Ok(build_action(&order))
}

fn frac(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn point(group: &Group, p: &Point) -> String {
    format!("{}\t{}", frac(&p.value), group.show(&p.label))
}

fn list(xs: &[usize]) -> String {
    if xs.is_empty() {
        return "-".to_string();
    }
    xs.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_parse(group: &Group, words: &[String], r: &mut Report) -> Result<i32> {
    r.field("group", &group.name);
    r.field("generators", group.presentation.alphabet.names().join(","));
    for rel in &group.presentation.relators {
        r.field("relator", group.show(rel));
    }
    let Some(rws) = &group.rws else {
        if !words.is_empty() {
            bail!("normalizing words needs --rules FILE");
        }
        return Ok(0);
    };
    r.field("rules", rws.rules().len());
    let confluent = match rws.check_confluence(1_000_000)? {
        ConfluenceReport::Confluent { pairs } => format!("true pairs={pairs}"),
        ConfluenceReport::NotConfluent { overlap, left, right, .. } => format!(
            "false overlap={} left={} right={}",
            group.show(&overlap),
            group.show(&left),
            group.show(&right)
        ),
        ConfluenceReport::Unknown { pairs } => format!("unknown pairs={pairs}"),
    };
    let ok = confluent.starts_with("true");
    r.field("confluent", confluent);
    let killed = group.presentation.relators.iter().all(|w| rws.normalize(w).is_ok_and(|n| n.is_empty()));
    r.field("relators_reduce_to_id", killed);
    for text in words {
        let w = group.word(text)?;
        r.field("normal_form", format!("{}\t{}", group.show(&w), group.show(&rws.normalize(&w)?)));
    }
    Ok(if ok && killed { 0 } else { 1 })
}

fn cmd_ball(group: &Group, radius: usize, r: &mut Report) -> Result<i32> {
    let b = ball(group, radius)?;
    r.field("group", &group.name);
    r.field("radius", radius);
    r.field("size", b.len());
    for k in 0..=radius {
        r.field("sphere", format!("{k}\t{}\t{}", b.sphere(k).len(), b.size_at(k)));
    }
    for i in 0..b.len() {
        r.field("element", format!("{i}\t{}\t{}", b.length(i), b.display(i)));
    }
    Ok(0)
}

struct ConeQuery<'a> {
    radius: usize,
    force: [(&'a [String], Sign); 3],
    trivial_c: bool,
    limit: usize,
    node_budget: Option<u64>,
    index: Option<usize>,
}

fn cmd_cones(group: &Group, q: &ConeQuery, parallel: bool, r: &mut Report) -> Result<i32> {
    let b = ball(group, q.radius)?;
    let mut constraints = Constraints { trivial_c: q.trivial_c, ..Constraints::default() };
    for (words, sign) in q.force {
        for text in words {
            let w = group.word(text)?;
            let i = b.locate(&w)?.inside().ok_or_else(|| anyhow!("`{text}` is outside the radius-{} ball", q.radius))?;
            constraints.forced.push((i, sign));
        }
    }
    let limit = q.index.map_or(q.limit, |k| q.limit.max(k + 1));
    let options = SearchOptions { limit, node_budget: q.node_budget, parallel, ..SearchOptions::default() };
    let out = search_cones(&b, &constraints, &options);
    if out.is_unsat() {
        r.raw(&format!("UNSAT nodes={}\n", out.nodes));
        return Ok(1);
    }
    if out.cones.is_empty() {
        r.raw(&format!("UNKNOWN budget exhausted nodes={}\n", out.nodes));
        return Ok(2);
    }
    let human = r.format == Format::Human;
    for (k, phi) in out.cones.iter().enumerate() {
        if q.index.is_some_and(|i| i != k) {
            continue;
        }
        if human {
            r.raw(&format!("# cone {k}\n"));
        } else {
            r.field("cone", k);
        }
        r.raw(&phi.to_text());
        r.raw("\n");
    }
    if q.index.is_some_and(|i| i >= out.cones.len()) {
        bail!("cone {} requested but the search found {}", q.index.unwrap_or(0), out.cones.len());
    }
    let summary = [
        ("cones", out.cones.len().to_string()),
        ("truncated", out.truncated.to_string()),
        ("budget_exhausted", out.budget_exhausted.to_string()),
        ("nodes", out.nodes.to_string()),
    ];
    for (key, value) in summary {
        // comment lines keep human output readable as a cone file
        if human {
            r.raw(&format!("# {key}: {value}\n"));
        } else {
            r.field(key, value);
        }
    }
    Ok(0)
}

fn cmd_realize(group: &Group, args: &ConeArgs, parallel: bool, r: &mut Report) -> Result<i32> {
    let (label, phi) = select_cone(group, args, parallel)?;
    let order = cone_to_coset_order(&phi).map_err(|e| anyhow!("cone {label} has no coset order: {e}"))?;
    let action = realize(&order)?;
    r.field("cone", label);
    r.field("cosets", order.coset_count());
    r.raw(&action.to_text());
    let b = phi.ball();
    let verdict = match verify_realization(&action, &order, &phi) {
        RealizationReport::Pass => "PASS".to_string(),
        RealizationReport::SignMismatch { element } => format!("FAIL sign element={}", b.display(element)),
        RealizationReport::MovesReference { element } => format!("FAIL moves-p element={}", b.display(element)),
        RealizationReport::Composition { element, coset } => {
            format!("FAIL composition element={} coset={}", b.display(element), b.display(order.representative(coset)))
        }
    };
    let pass = verdict == "PASS";
    r.field("verify", verdict);
    Ok(if pass { 0 } else { 1 })
}

fn recurrence_line(rec: &Recurrence) -> String {
    match rec {
        Recurrence::RecurrentUpToBound { witnesses } => format!("RECURRENT-UP-TO-BOUND witnesses={}", list(witnesses)),
        Recurrence::Fails { breaks } => format!("FAILS breaks={}", list(breaks)),
        Recurrence::Undecided { decided } => format!("UNDECIDED decided={decided}"),
    }
}

fn cmd_crossings(group: &Group, args: &ConeArgs, bounds: (usize, usize), parallel: bool, r: &mut Report) -> Result<i32> {
    let (word_bound, power_bound) = bounds;
    let a = action(group, args, parallel, r)?;
    r.field("points", a.points().len());
    match find_crossing(&a, word_bound, power_bound, parallel)? {
        CrossingOutcome::Found(x) => {
            r.field("crossing", "FOUND");
            r.field("f", group.show(&x.f));
            r.field("g", group.show(&x.g));
            r.field("u", point(group, &x.u));
            r.field("v", point(group, &x.v));
            r.field("w", point(group, &x.w));
            r.field("N", x.n);
            r.field("M", x.m);
            r.field("power_bound", x.n_max);
            r.field("replay", x.replay(&a));
            let (h, chain) = lemma_chain(&x);
            let bound = (2 * x.n + 2).max(16);
            let rec = recurrence_check(&a.order(), &h, &chain, bound)?;
            r.field("lemma_h", group.show(&h));
            r.field("lemma_chain", chain.iter().map(|w| group.show(w)).collect::<Vec<_>>().join(","));
            r.field("lemma_recurrence", format!("{} bound={bound}", recurrence_line(&rec)));
        }
        CrossingOutcome::NoneUpToBound { word_bound, power_bound } => {
            r.field("crossing", format!("NONE-UP-TO-BOUND word_bound={word_bound} power_bound={power_bound}"));
        }
    }
    Ok(0)
}

fn cmd_recurrence(group: &Group, args: &ConeArgs, chain: &str, h: &str, bound: usize, parallel: bool, r: &mut Report) -> Result<i32> {
    let chain: Vec<Word> = chain.split(',').map(|s| group.word(s)).collect::<Result<_>>()?;
    let h = group.word(h)?;
    let affine = group.entry.and_then(CatalogEntry::affine_model).is_some();
    let explicit = args.cone.is_some() || args.index.is_some();
    let a = if explicit || affine {
        action(group, args, parallel, r)?
    } else {
        // the first searched cone in which the chain increases
        let b = ball(group, args.radius)?;
        let out = search_cones(&b, &Constraints::default(), &SearchOptions { parallel, ..SearchOptions::default() });
        let found = out.cones.iter().enumerate().find_map(|(k, phi)| {
            let a = build_action(&cone_to_coset_order(phi).ok()?);
            let increasing = chain.windows(2).all(|p| a.order().compare(&p[0], &p[1]) == Some(std::cmp::Ordering::Less));
            increasing.then_some((k, a))
        });
        let (k, a) = found.ok_or_else(|| anyhow!("the chain increases in none of the {} cones", out.cones.len()))?;
        r.field("model", "cosets");
        r.field("cone", k);
        a
    };
    r.field("chain", chain.iter().map(|w| group.show(w)).collect::<Vec<_>>().join(","));
    r.field("h", group.show(&h));
    r.field("bound", bound);
    let rec = recurrence_check(&a.order(), &h, &chain, bound)?;
    let fails = matches!(rec, Recurrence::Fails { .. });
    r.field("recurrence", recurrence_line(&rec));
    Ok(if fails { 1 } else { 0 })
}

struct EnvelopeQuery<'a> {
    g: &'a str,
    x: Option<&'a str>,
    bound: usize,
    nesting: bool,
    word_bound: usize,
}

fn cmd_envelope(group: &Group, args: &ConeArgs, q: &EnvelopeQuery, parallel: bool, r: &mut Report) -> Result<i32> {
    let a = action(group, args, parallel, r)?;
    let g = group.word(q.g)?;
    let x = match q.x {
        Some(s) => s.trim().parse::<BigRational>().map_err(|e| anyhow!("bad rational `{s}`: {e}"))?,
        None => a.points()[0].clone(),
    };
    let e = convex_envelope(&a, &g, &x, q.bound);
    r.field("g", group.show(&g));
    r.field("x", frac(&x));
    r.field("bound", q.bound);
    for (n, y) in &e.orbit {
        r.field("orbit", format!("{n}\t{}", frac(y)));
    }
    r.field("lo", if e.unbounded_below { "-inf".to_string() } else { frac(&e.lo) });
    r.field("hi", if e.unbounded_above { "+inf".to_string() } else { frac(&e.hi) });
    r.field("complete", e.complete);
    r.field("hull_points", e.hull.len());
    let cofinal = match cofinal_test(&a, &g, q.bound) {
        Cofinality::CofinalInTruncation => "COFINAL-IN-TRUNCATION".to_string(),
        Cofinality::NotCofinal { x, bound: None } => format!("NOT-COFINAL fixes={}", frac(&x)),
        Cofinality::NotCofinal { x, bound: Some(y) } => format!("NOT-COFINAL from={} below={}", frac(&x), frac(&y)),
        Cofinality::Unknown => "UNKNOWN".to_string(),
    };
    r.field("cofinal", cofinal);
    if q.nesting {
        let n = nesting_report(&a, q.word_bound, q.bound)?;
        r.field("nesting_disjoint", n.disjoint);
        r.field("nesting_nested", n.nested);
        r.field("nesting_overlapping", n.overlapping);
        if let Some((g1, x1, g2, x2)) = &n.first_overlap {
            r.field("first_overlap", format!("{} {} {} {}", group.show(g1), frac(x1), group.show(g2), frac(x2)));
        }
        r.field("translate_equal", n.translate_equal);
        r.field("translate_disjoint", n.translate_disjoint);
        r.field("translate_overlapping", n.translate_overlapping);
        if let Some((f, g1, x1)) = &n.first_translate_overlap {
            r.field("first_translate_overlap", format!("{} {} {}", group.show(f), group.show(g1), frac(x1)));
        }
        r.field("skipped", n.skipped);
    }
    Ok(0)
}

fn cmd_certify(group: &Group, r: &mut Report) -> Result<i32> {
    let all = match group.entry {
        Some(e) => e.all_presentations(),
        None => vec![("file", group.presentation.clone())],
    };
    r.field("group", &group.name);
    let mut negative = false;
    for (label, p) in &all {
        let m = abelianize(p);
        let c = certify_surjection(p);
        negative |= !c.surjects();
        r.field("presentation", label);
        r.field("matrix", &m);
        r.field("certificate", c.display(&p.alphabet));
        r.field("verified", c.verify(&m));
    }
    Ok(if negative { 1 } else { 0 })
}

struct PipelineQuery<'a> {
    preset: &'a str,
    radius: usize,
    bounds: usize,
    word_bound: usize,
    limit: usize,
    node_budget: Option<u64>,
    exploratory: bool,
}

fn cmd_pipeline(q: &PipelineQuery, parallel: bool, r: &mut Report) -> Result<i32> {
    let entry = catalog::lookup(q.preset).ok_or_else(|| anyhow!("unknown preset `{}`", q.preset))?;
    let node_budget = q.node_budget.or(q.exploratory.then_some(EXPLORATORY_BUDGET));
    let bounds = PipelineBounds {
        word_bound: q.word_bound,
        power_bound: q.bounds,
        recurrence_bound: q.bounds,
        limit: q.limit,
        node_budget,
    };
    let report = pipeline_check(entry, q.radius, &bounds, q.exploratory, parallel)?;
    for line in report.to_records().lines() {
        let (key, value) = line.split_once('\t').unwrap_or((line, ""));
        r.field(key, value);
    }
    Ok(if report.verdict == Verdict::Inconsistent { 1 } else { 0 })
}

fn cmd_catalog(show: Option<&str>, r: &mut Report) -> Result<i32> {
    let Some(name) = show else {
        for e in CATALOG {
            r.field(e.name, e.summary);
        }
        return Ok(0);
    };
    let e = catalog::lookup(name).ok_or_else(|| anyhow!("unknown preset `{name}`"))?;
    r.field("name", e.name);
    r.field("summary", e.summary);
    r.field("presentation", e.presentation);
    for (label, text) in e.alternates {
        r.field("alternate", format!("{label}\t{text}"));
    }
    r.field("rules", e.rewriting_system().rules().len());
    r.field("affine_model", e.affine.is_some());
    r.field("notes", e.notes);
    Ok(0)
}

fn dispatch(cli: &Cli, r: &mut Report) -> Result<i32> {
    let parallel = cli.parallelism > 1;
    match &cli.command {
        Command::Parse { group, word } => cmd_parse(&load_group(group)?, word, r),
        Command::Ball { group, radius } => cmd_ball(&load_group(group)?, *radius, r),
        Command::Cones { group, radius, force_star, force_pos, force_neg, trivial_c, limit, node_budget, index } => {
            let q = ConeQuery {
                radius: *radius,
                force: [(force_star, Sign::Star), (force_pos, Sign::Pos), (force_neg, Sign::Neg)],
                trivial_c: *trivial_c,
                limit: *limit,
                node_budget: *node_budget,
                index: *index,
            };
            cmd_cones(&load_group(group)?, &q, parallel, r)
        }
        Command::Realize { group, cone } => cmd_realize(&load_group(group)?, cone, parallel, r),
        Command::Crossings { group, cone, word_bound, power_bound } => {
            cmd_crossings(&load_group(group)?, cone, (*word_bound, *power_bound), parallel, r)
        }
        Command::Recurrence { group, cone, chain, h, bound } => {
            cmd_recurrence(&load_group(group)?, cone, chain, h, *bound, parallel, r)
        }
        Command::Envelope { group, cone, g, x, bound, nesting, word_bound } => {
            let q = EnvelopeQuery { g, x: x.as_deref(), bound: *bound, nesting: *nesting, word_bound: *word_bound };
            cmd_envelope(&load_group(group)?, cone, &q, parallel, r)
        }
        Command::Certify { group } => cmd_certify(&load_group(group)?, r),
        Command::Pipeline { preset, radius, bounds, word_bound, limit, node_budget, exploratory } => {
            let q = PipelineQuery {
                preset,
                radius: *radius,
                bounds: *bounds,
                word_bound: *word_bound,
                limit: *limit,
                node_budget: *node_budget,
                exploratory: *exploratory,
            };
            cmd_pipeline(&q, parallel, r)
        }
        Command::Catalog { show } => cmd_catalog(show.as_deref(), r),
    }
}

/// Runs one command line; output goes to `out`, diagnostics to stderr.
pub fn run<I, S>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                eprint!("{e}");
            }
            return code;
        }
    };
    if cli.parallelism == 0 {
        eprintln!("error: --parallelism must be at least 1");
        return 2;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.parallelism).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {} threads: {e}", cli.parallelism);
            return 2;
        }
    };
    let mut report = Report { format: cli.format, text: String::new() };
    let result = pool.install(|| dispatch(&cli, &mut report));
    // partial output is still useful next to an error
    let _ = out.write_all(report.text.as_bytes());
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}
