// quick diagnostic of c07 far bins and c13 curve
use hypermux::analytics::{self};
use hypermux::coupling::CorrelationParams;
use hypermux::embedding::{self, EmbeddingConfig};
use hypermux::generator::{self, apply_link_persistence, generate_gmm};
use hypermux::geom::{derive_params, TrigCache};
use hypermux::rng::seeded_stream;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() {
    // --- c07 diagnostics
    let p1 = derive_params(10_000, 8.0, 2.8, 0.7).unwrap();
    let p2 = derive_params(10_000, 8.0, 2.3, 0.5).unwrap();
    let corr = CorrelationParams::new(0.0, 1e-4, p2.n_nodes).unwrap();
    let w = 0.4;
    let gmm = generate_gmm(&p1, &p2, &corr, 10_000, 700).unwrap();
    let m = apply_link_persistence(&gmm, w, 700).unwrap();
    let n = m.common_count;
    let eta = p1.mean_degree / p1.n_nodes as f64;
    let trig = TrigCache::new(&m.layer2.coords);
    let mut bins: Vec<(u64, u64, f64, f64)> = vec![(0, 0, 0.0, 0.0); 50];
    for k in 0..n {
        for l in (k + 1)..n {
            let x2 = trig.distance(k, l);
            let idx = (x2.floor() as usize).min(49);
            let p2x = p2.connection_probability(x2);
            let q = p2x + (1.0 - p2x) * w * eta;
            bins[idx].0 += 1;
            bins[idx].1 += m.layer2.graph.has_edge(k as u32, l as u32) as u64;
            bins[idx].2 += q;
            bins[idx].3 += q * (1.0 - q);
        }
    }
    println!("c07 bins (idx, count, S, mu, sigma, z):");
    for (i, b) in bins.iter().enumerate() {
        if b.0 == 0 { continue; }
        let sigma = b.3.sqrt();
        let z = if sigma > 0.0 { (b.1 as f64 - b.2).abs() / sigma } else { (b.1 as f64 - b.2).abs() };
        if i >= 30 || z > 2.0 {
            println!("  bin {i}: n={} S={} mu={:.3} sigma={:.3} z={:.2}", b.0, b.1, b.2, sigma, z);
        }
    }

    // --- c13 curve diagnostics
    let params = derive_params(2000, 10.0, 2.5, 0.5).unwrap();
    let mut rng = seeded_stream(1300, 0xE1);
    let coords = generator::sample_layer_coords(&params, &mut rng);
    let graph = generator::generate_layer(&params, &coords, &hypermux::rng::PairStream::new(1300, 0xE2));
    let embed_params = derive_params(2000, graph.mean_degree(), 2.5, 0.5).unwrap();
    let config = EmbeddingConfig::new(240, 2, 0.5, 2.5).unwrap();
    let mut embed_rng = ChaCha12Rng::seed_from_u64(1301);
    let (inferred, _trace) = embedding::embed_layer_traced(&graph, &embed_params, &config, &mut embed_rng).unwrap();
    let trig = TrigCache::new(&inferred);
    let mut curve = analytics::BinnedCurve::new(1.0);
    for i in 0..inferred.len() {
        for j in (i + 1)..inferred.len() {
            curve.add(trig.distance(i, j), graph.has_edge(i as u32, j as u32) as u64 as f64);
        }
    }
    println!("c13 re-embedded p(x) bins (left, count, p):");
    for i in 0..curve.n_bins() {
        if curve.counts[i] > 0 {
            println!("  [{:>2}, {:>2}): n={:>8} p={:.4}", i, i+1, curve.counts[i], curve.estimate(i).unwrap());
        }
    }
    println!("R = {}", embed_params.disc_radius);
}
