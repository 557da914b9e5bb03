//! Command-line front end: generate correlated two-layer multiplexes with
//! link persistence, embed observed layers, compute empirical multiplex
//! statistics, run trans-layer link prediction, and export theoretical
//! reference curves.

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hypermux::analytics::{self, CommonView, PairSet, WAveraging};
use hypermux::coupling::CorrelationParams;
use hypermux::embedding::{self, EmbeddingConfig};
use hypermux::generator::{apply_link_persistence, generate_gmm};
use hypermux::geom::derive_params;
use hypermux::io::{self, IdMap, Manifest, RunConfig};
use hypermux::linkpred::{self, PsiKind};
use hypermux::theory::{self, Regime, TheoryContext};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "hypermux", version, about)]
struct Cli {
    /// Size of the worker thread pool (default: available cores). Results
    /// are independent of this value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a two-layer multiplex with link persistence from a config.
    Generate(GenerateArgs),
    /// Infer hyperbolic coordinates for an observed layer.
    Embed(EmbedArgs),
    /// Empirical trans-layer statistics of a two-layer multiplex.
    Analyze(AnalyzeArgs),
    /// Trans-layer link prediction metrics over a grid of w.
    Predict(PredictArgs),
    /// Theoretical reference curves for a configured model.
    Theory(TheoryArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Flat key-value run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct EmbedArgs {
    /// Edge list of the layer to embed.
    #[arg(long)]
    edges: PathBuf,
    /// Degree exponent; estimated from the degree sequence when omitted.
    #[arg(long)]
    gamma: Option<f64>,
    /// Temperature used in the likelihood.
    #[arg(long)]
    temperature: f64,
    /// Target mean degree; observed mean degree when omitted.
    #[arg(long)]
    kbar: Option<f64>,
    /// Angular grid resolution per node.
    #[arg(long, default_value_t = 360)]
    candidates: usize,
    /// Per-node re-optimization sweeps after greedy placement.
    #[arg(long, default_value_t = 3)]
    passes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    l1_edges: PathBuf,
    #[arg(long)]
    l1_coords: PathBuf,
    #[arg(long)]
    l2_edges: PathBuf,
    #[arg(long)]
    l2_coords: PathBuf,
    /// `id1 id2` lines tying layer-1 nodes to layer-2 nodes; defaults to
    /// identifying nodes by shared ids.
    #[arg(long)]
    node_map: Option<PathBuf>,
    /// Persistent-edge list (layer-2 ids); enables the degree-product CCDFs.
    #[arg(long)]
    persistent_edges: Option<PathBuf>,
    /// Distance bin width.
    #[arg(long, default_value_t = 1.0)]
    bins: f64,
    /// Plateau threshold for the w estimate; defaults to the largest
    /// layer-2 radial coordinate (the embedded disc radius).
    #[arg(long)]
    r_threshold: Option<f64>,
    /// Weight plateau bins by their pair counts instead of uniformly.
    #[arg(long)]
    w_by_pair: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    l1_edges: PathBuf,
    #[arg(long)]
    l1_coords: PathBuf,
    #[arg(long)]
    l2_edges: PathBuf,
    #[arg(long)]
    node_map: Option<PathBuf>,
    /// Comma-separated persistence weights to evaluate.
    #[arg(long, default_value = "0,0.01,0.2,0.5,0.9,1")]
    w_grid: String,
    /// Distance kernel: `exp`, `zero` or `const:C`.
    #[arg(long, default_value = "exp")]
    psi: String,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RegimeArg {
    Uncorrelated,
    Max,
}

#[derive(Args)]
struct TheoryArgs {
    /// Flat key-value run configuration (the same format as `generate`).
    #[arg(long)]
    config: PathBuf,
    /// Correlation regime of the closed-form curves.
    #[arg(long, value_enum, default_value_t = RegimeArg::Uncorrelated)]
    regime: RegimeArg,
    /// Upper end of the distance grids; defaults to 2 R2.
    #[arg(long)]
    x_max: Option<f64>,
    /// Step of the distance grids.
    #[arg(long, default_value_t = 0.1)]
    x_step: f64,
    /// Conditional-CDF/PDF evaluation point `r1,r1p,dtheta1`; repeatable.
    #[arg(long = "cdf-point")]
    cdf_points: Vec<String>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            fail(&format!("thread pool: {e}"));
        }
    }
    let result = match cli.command {
        Command::Generate(args) => run_generate(args),
        Command::Embed(args) => run_embed(args),
        Command::Analyze(args) => run_analyze(args),
        Command::Predict(args) => run_predict(args),
        Command::Theory(args) => run_theory(args),
    };
    if let Err(e) = result {
        fail(&format!("{e:#}"));
    }
}

fn fail(msg: &str) -> ! {
    eprintln!("{}", serde_json::json!({ "error": msg }));
    std::process::exit(1);
}

fn write(path: &Path, content: &str) -> anyhow::Result<()> {
    std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn run_generate(args: GenerateArgs) -> anyhow::Result<()> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let params1 = derive_params(config.n1, config.k1, config.gamma1, config.t1)?;
    let k2 = config.effective_k2()?;
    let params2 = derive_params(config.n2, k2, config.gamma2, config.t2)?;
    let corr = CorrelationParams::new(config.nu, config.g, config.n2)?;

    let gmm = generate_gmm(&params1, &params2, &corr, config.common, config.seed)?;
    let m = apply_link_persistence(&gmm, config.w, config.seed)?;

    std::fs::create_dir_all(&args.out)?;
    let ids1 = IdMap::dense(config.n1);
    let ids2 = IdMap::dense(config.n2);
    io::write_edge_list(&args.out.join("layer1.edges"), &m.layer1.graph, &ids1)?;
    io::write_edge_list(&args.out.join("layer2.edges"), &m.layer2.graph, &ids2)?;
    io::write_coords(&args.out.join("layer1.coords"), &m.layer1.coords, &ids1)?;
    io::write_coords(&args.out.join("layer2.coords"), &m.layer2.coords, &ids2)?;
    {
        // Persistent edges in layer-2 id space.
        let mut text = String::new();
        for &(ka, kb) in &m.persistent_edges {
            let (a2, b2) = (m.node_map[ka as usize].1, m.node_map[kb as usize].1);
            text.push_str(&format!("{} {}\n", ids2.names[a2 as usize], ids2.names[b2 as usize]));
        }
        write(&args.out.join("persistent.edges"), &text)?;
    }

    let manifest = Manifest {
        seed: config.seed,
        config: config.clone(),
        params1,
        params2,
        corr,
        w: config.w,
        common_count: m.common_count,
        layer1_edges: m.layer1.graph.n_edges(),
        layer2_edges: m.layer2.graph.n_edges(),
        persistent_edges: m.persistent_edges.len(),
        mean_degree1: m.layer1.graph.mean_degree(),
        mean_degree2: m.layer2.graph.mean_degree(),
        node_ids: "dense integers 0..N per layer; common nodes are 0..common in both".into(),
        outputs: vec![
            "layer1.edges".into(),
            "layer2.edges".into(),
            "layer1.coords".into(),
            "layer2.coords".into(),
            "persistent.edges".into(),
        ],
    };
    io::write_manifest(&args.out.join("manifest.json"), &manifest)?;
    println!(
        "generated: N1={} E1={} N2={} E2={} persistent={} seed={}",
        config.n1,
        m.layer1.graph.n_edges(),
        config.n2,
        m.layer2.graph.n_edges(),
        m.persistent_edges.len(),
        config.seed
    );
    Ok(())
}

fn run_embed(args: EmbedArgs) -> anyhow::Result<()> {
    let parsed = io::parse_edge_list(&args.edges)?;
    if parsed.dropped > 0 {
        eprintln!("note: dropped {} self-loops/duplicate edges", parsed.dropped);
    }
    let graph = parsed.graph;
    let gamma = match args.gamma {
        Some(g) => g,
        None => embedding::estimate_gamma(&graph.degrees())?,
    };
    let kbar = args.kbar.unwrap_or_else(|| graph.mean_degree());
    let params = derive_params(graph.n_nodes(), kbar, gamma, args.temperature)?;
    let config = EmbeddingConfig::new(args.candidates, args.passes, args.temperature, gamma)?;
    let mut rng = hypermux::rng::seeded_stream(args.seed, 0x99);
    let coords = embedding::embed_layer(&graph, &params, &config, &mut rng)?;
    let ll = embedding::log_likelihood(&coords, &graph, &params);

    std::fs::create_dir_all(&args.out)?;
    io::write_coords(&args.out.join("embedded.coords"), &coords, &parsed.ids)?;
    let summary = serde_json::json!({
        "nodes": graph.n_nodes(),
        "edges": graph.n_edges(),
        "gamma": gamma,
        "gamma_estimated": args.gamma.is_none(),
        "temperature": args.temperature,
        "kbar": kbar,
        "disc_radius": params.disc_radius,
        "log_likelihood": ll,
        "candidates": args.candidates,
        "passes": args.passes,
        "seed": args.seed,
    });
    write(&args.out.join("embedded.json"), &format!("{summary:#}\n"))?;
    println!("embedded: N={} gamma={gamma:.4} R={:.4} log_likelihood={ll:.6}",
        graph.n_nodes(), params.disc_radius);
    Ok(())
}

struct LoadedPair {
    view: CommonView,
    node_map: Vec<(u32, u32)>,
    ids2: IdMap,
}

/// Loads one layer; the node set is the union of the coordinate-file ids
/// (covering isolated nodes) and the edge-list ids.
fn load_layer(
    edges: &Path,
    coords: Option<&Path>,
) -> anyhow::Result<(hypermux::graph::Graph, hypermux::geom::NodeCoords, IdMap)> {
    let mut ids = IdMap::new();
    if let Some(p) = coords {
        io::scan_coord_ids(p, &mut ids)?;
    }
    let (graph, dropped) = io::parse_edge_list_with(edges, &mut ids)?;
    if dropped > 0 {
        eprintln!(
            "note: dropped {dropped} self-loops/duplicate edges in {}",
            edges.display()
        );
    }
    let coords = match coords {
        Some(p) => io::read_coords(p, &ids)?,
        None => hypermux::geom::NodeCoords::new(
            vec![0.0; graph.n_nodes()],
            vec![0.0; graph.n_nodes()],
        )?,
    };
    Ok((graph, coords, ids))
}

fn load_pair(
    l1_edges: &Path,
    l1_coords: Option<&Path>,
    l2_edges: &Path,
    l2_coords: Option<&Path>,
    node_map: Option<&Path>,
) -> anyhow::Result<LoadedPair> {
    let (graph1, coords1, ids1) = load_layer(l1_edges, l1_coords)?;
    let (graph2, coords2, ids2) = load_layer(l2_edges, l2_coords)?;
    let map = match node_map {
        Some(p) => io::read_node_map(p, &ids1, &ids2)?,
        None => io::shared_id_map(&ids1, &ids2),
    };
    if map.len() < 2 {
        bail!("fewer than 2 common nodes between the layers");
    }
    let view = CommonView::from_parts(&graph1, &coords1, &graph2, &coords2, &map);
    Ok(LoadedPair {
        view,
        node_map: map,
        ids2,
    })
}

fn run_analyze(args: AnalyzeArgs) -> anyhow::Result<()> {
    let loaded = load_pair(
        &args.l1_edges,
        Some(&args.l1_coords),
        &args.l2_edges,
        Some(&args.l2_coords),
        args.node_map.as_deref(),
    )?;
    let view = &loaded.view;
    std::fs::create_dir_all(&args.out)?;

    let mut p_trans_c = None;
    for set in [PairSet::Connected, PairSet::Disconnected, PairSet::All] {
        let trans = analytics::trans_layer_probability(view, set, args.bins)?;
        write(
            &args.out.join(format!("p_trans_{}.csv", set.label())),
            &io::curve_to_csv(&trans),
        )?;
        if set == PairSet::Connected {
            p_trans_c = Some(trans);
        }
        let within = analytics::within_layer_probability(view, set, args.bins)?;
        write(
            &args.out.join(format!("p2_{}.csv", set.label())),
            &io::curve_to_csv(&within),
        )?;
        let cond = analytics::conditional_mean_distance(view, set, args.bins)?;
        write(
            &args.out.join(format!("e_x2_given_x1_{}.csv", set.label())),
            &io::curve_to_csv(&cond),
        )?;
    }

    let r_threshold = args.r_threshold.unwrap_or_else(|| {
        view.coords2
            .radial
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    });
    let averaging = if args.w_by_pair {
        WAveraging::ByPair
    } else {
        WAveraging::ByBin
    };
    let (w_est, w_sigma) = analytics::estimate_w(p_trans_c.as_ref().unwrap(), r_threshold, averaging)?;
    let overlap = analytics::edge_overlap(view)?;
    let (clust1, _) = analytics::clustering_stats(&view.graph1);
    let (clust2, _) = analytics::clustering_stats(&view.graph2);

    if let Some(pers_path) = &args.persistent_edges {
        let inverse2: std::collections::HashMap<u32, u32> = loaded
            .node_map
            .iter()
            .enumerate()
            .map(|(k, &(_, j))| (j, k as u32))
            .collect();
        let parsed = io::parse_edge_list(pers_path)?;
        let mut persistent = Vec::new();
        for (u, v) in parsed.graph.edges() {
            let a = loaded.ids2.get(&parsed.ids.names[u as usize]);
            let b = loaded.ids2.get(&parsed.ids.names[v as usize]);
            if let (Some(a), Some(b)) = (a, b) {
                if let (Some(&ka), Some(&kb)) = (inverse2.get(&a), inverse2.get(&b)) {
                    persistent.push((ka.min(kb), ka.max(kb)));
                }
            }
        }
        let (pers, non_pers) = analytics::degree_product_ccdf(&persistent, view);
        write(&args.out.join("degree_product_persistent.csv"), &io::ccdf_to_csv(&pers))?;
        write(
            &args.out.join("degree_product_non_persistent.csv"),
            &io::ccdf_to_csv(&non_pers),
        )?;
    }

    let summary = serde_json::json!({
        "common_nodes": view.n,
        "common_edges_layer1": view.graph1.n_edges(),
        "common_edges_layer2": view.graph2.n_edges(),
        "edge_overlap": overlap,
        "w_estimate": w_est,
        "w_sigma": w_sigma,
        "r_threshold": r_threshold,
        "w_averaging": if args.w_by_pair { "by_pair" } else { "by_bin" },
        "mean_clustering_layer1": clust1,
        "mean_clustering_layer2": clust2,
        "bin_width": args.bins,
    });
    write(&args.out.join("summary.json"), &format!("{summary:#}\n"))?;
    println!(
        "analyzed: common={} overlap={overlap:.4} w={w_est:.4} sigma_w={w_sigma:.4}",
        view.n
    );
    Ok(())
}

fn parse_psi(text: &str) -> anyhow::Result<PsiKind> {
    let psi = match text {
        "exp" => PsiKind::Exponential,
        "zero" => PsiKind::Zero,
        other => match other.strip_prefix("const:") {
            Some(c) => PsiKind::Constant(c.parse().context("psi constant")?),
            None => bail!("psi must be `exp`, `zero` or `const:C`, got {other:?}"),
        },
    };
    psi.validate()?;
    Ok(psi)
}

fn parse_grid(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|tok| tok.trim().parse::<f64>().with_context(|| format!("grid value {tok:?}")))
        .collect()
}

fn run_predict(args: PredictArgs) -> anyhow::Result<()> {
    let psi = parse_psi(&args.psi)?;
    let grid = parse_grid(&args.w_grid)?;
    let loaded = load_pair(
        &args.l1_edges,
        Some(&args.l1_coords),
        &args.l2_edges,
        None,
        args.node_map.as_deref(),
    )?;
    let view = &loaded.view;
    let rows = linkpred::sweep_w(&view.coords1, &view.graph1, &view.graph2, &psi, &grid)?;
    std::fs::create_dir_all(&args.out)?;
    write(&args.out.join("prediction_metrics.csv"), &io::sweep_to_csv(&rows))?;
    for (w, roc, pr) in &rows {
        println!("w={w:.3} auroc={roc:.4} aupr={pr:.4}");
    }
    Ok(())
}

fn run_theory(args: TheoryArgs) -> anyhow::Result<()> {
    let config = RunConfig::load(&args.config)?;
    let params1 = derive_params(config.n1, config.k1, config.gamma1, config.t1)?;
    let params2 = derive_params(config.n2, config.effective_k2()?, config.gamma2, config.t2)?;
    let corr = CorrelationParams::new(config.nu, config.g, config.n2)?;
    let ctx = TheoryContext::new(params1, params2, corr, config.w)?;
    let regime = match args.regime {
        RegimeArg::Uncorrelated => Regime::Uncorrelated,
        RegimeArg::Max => Regime::MaxCorrelated,
    };
    let x_max = args.x_max.unwrap_or(2.0 * params2.disc_radius);
    let grid: Vec<f64> = {
        let steps = (x_max / args.x_step).ceil() as usize;
        (0..=steps).map(|k| k as f64 * args.x_step).collect()
    };
    std::fs::create_dir_all(&args.out)?;

    let p2_all: Vec<(f64, f64)> = grid
        .iter()
        .map(|&x| (x, theory::p2_all_prediction(&ctx, x, regime)))
        .collect();
    write(&args.out.join("p2_all_prediction.csv"), &io::xy_to_csv("x2,p2_all", &p2_all))?;

    let trans_c: Vec<(f64, f64)> = grid
        .iter()
        .map(|&x| (x, theory::trans_layer_limits(&ctx, x, theory::LimitSet::Connected, regime)))
        .collect();
    write(&args.out.join("p_trans_c_prediction.csv"), &io::xy_to_csv("x1,p_trans_c", &trans_c))?;
    let trans_d: Vec<(f64, f64)> = grid
        .iter()
        .map(|&x| (x, theory::trans_layer_limits(&ctx, x, theory::LimitSet::Disconnected, regime)))
        .collect();
    write(&args.out.join("p_trans_d_prediction.csv"), &io::xy_to_csv("x1,p_trans_d", &trans_d))?;

    {
        let mut out = String::from("r,lower,upper\n");
        let steps = (params2.disc_radius / args.x_step).ceil() as usize;
        for k in 0..=steps {
            let r = (k as f64 * args.x_step).min(params2.disc_radius);
            let (lo, hi) = match theory::kbar2_tilde_prediction(&ctx, r, regime) {
                theory::DegreePrediction::Point(v) => (v, v),
                theory::DegreePrediction::Bounds { lower, upper } => (lower, upper),
            };
            out.push_str(&format!("{r},{lo},{hi}\n"));
        }
        write(&args.out.join("kbar2_tilde_prediction.csv"), &out)?;
    }

    for (i, point) in args.cdf_points.iter().enumerate() {
        let parts = parse_grid(point)?;
        if parts.len() != 3 {
            bail!("--cdf-point needs `r1,r1p,dtheta1`, got {point:?}");
        }
        let (r1, r1p, dt1) = (parts[0], parts[1], parts[2]);
        let cdf = theory::conditional_cdf_grid(&grid, r1, r1p, dt1, &ctx)?;
        let rows: Vec<(f64, f64)> = grid.iter().copied().zip(cdf.iter().copied()).collect();
        write(
            &args.out.join(format!("cond_cdf_{i}.csv")),
            &io::xy_to_csv("x2,cdf", &rows),
        )?;
        // PDF from the CDF grid by central differences of adjacent points.
        let mut pdf_rows = Vec::new();
        for k in 1..grid.len() - 1 {
            let pdf = ((cdf[k + 1] - cdf[k - 1]) / (grid[k + 1] - grid[k - 1])).max(0.0);
            pdf_rows.push((grid[k], pdf));
        }
        write(
            &args.out.join(format!("cond_pdf_{i}.csv")),
            &io::xy_to_csv("x2,pdf", &pdf_rows),
        )?;
    }

    let bounds = theory::average_degree_bounds(&ctx);
    let summary = serde_json::json!({
        "regime": format!("{regime:?}"),
        "disc_radius_1": params1.disc_radius,
        "disc_radius_2": params2.disc_radius,
        "average_degree_lower": bounds.lower,
        "average_degree_upper": bounds.upper,
        "average_degree_uncorrelated": bounds.uncorrelated,
        "w": config.w,
    });
    write(&args.out.join("theory_summary.json"), &format!("{summary:#}\n"))?;
    println!(
        "theory: R1={:.4} R2={:.4} k2_bounds=({:.4}, {:.4})",
        params1.disc_radius, params2.disc_radius, bounds.lower, bounds.upper
    );
    Ok(())
}
