//! `stratify` and `spectrum`: single-graph inspection commands.

use sgs_core::spectral::{eig_sym, EigenDocument};
use sgs_core::stratify::stratified_adjacencies;
use sgs_core::{Graph, GraphSignal, SgsConfig, SgsEngine, SpectrumSet};

use crate::error::Result;
use crate::output::{fmt_f, Artifacts, Table};
use crate::svg::{line_plot, Series};

/// Strata and their Laplacian eigensystems.
pub fn stratify(g: &Graph) -> Result<Artifacts> {
    let family = stratified_adjacencies(g)?;
    let mut art = Artifacts::default();
    let mut stats = Table::new(&["K", "edges", "components", "singletons", "lambda_max"]);
    let mut eigen = Vec::new();
    for st in family.strata() {
        let e = eig_sym(&st.laplacian())?;
        stats.push(vec![
            st.k().to_string(),
            st.num_edges().to_string(),
            st.components().to_string(),
            st.singletons().to_string(),
            fmt_f(*e.values.last().expect("non-empty graph")),
        ]);
        eigen.push(EigenDocument::new(st.k(), &e));
    }
    let strata: Vec<_> = family.strata().iter().map(|s| s.to_document()).collect();
    art.documents.push(("strata".into(), serde_json::to_value(strata).expect("serializable")));
    art.documents.push(("eigen".into(), serde_json::to_value(eigen).expect("serializable")));
    art.table("stats", stats);
    Ok(art)
}

fn flags(m: &sgs_core::MagnitudeVector, eigenvalue: f64) -> String {
    let mut f = Vec::new();
    if eigenvalue.abs() < sgs_core::spectral::ZERO_EIGEN_TOL {
        f.push("zero_eigen");
    }
    if m.zero_norm {
        f.push("zero_norm");
    }
    if m.empty_stratum {
        f.push("empty_stratum");
    }
    f.join("|")
}

pub fn spectrum_table(set: &SpectrumSet) -> Table {
    let mut t = Table::new(&["method", "K", "index", "eigenvalue", "magnitude", "magnitude_normalized", "flags"]);
    for e in &set.entries {
        let values = &set.eigenvalues[e.k - 1];
        for (i, (m, mn)) in e.magnitudes.raw.iter().zip(&e.magnitudes.normalized).enumerate() {
            t.push(vec![
                e.method.to_string(),
                e.k.to_string(),
                i.to_string(),
                fmt_f(values[i]),
                fmt_f(*m),
                fmt_f(*mn),
                flags(&e.magnitudes, values[i]),
            ]);
        }
    }
    t
}

/// Spectrum of one signal, or of two (initial and final) overlaid.
pub fn spectrum(g: &Graph, signal: &GraphSignal, second: Option<&GraphSignal>, cfg: &SgsConfig) -> Result<Artifacts> {
    let family = stratified_adjacencies(g)?;
    let engine = SgsEngine::prepare(&family, cfg)?;
    let first = engine.apply(signal)?;
    let second = second.map(|s| engine.apply(s)).transpose()?;
    let mut art = Artifacts::default();
    art.table("spectrum", spectrum_table(&first));
    if let Some(s) = &second {
        art.table("spectrum_final", spectrum_table(s));
    }
    for k in 1..=first.num_strata() {
        let values = &first.eigenvalues[k - 1];
        let mut series = Vec::new();
        for (tag, set) in std::iter::once(("", &first)).chain(second.iter().map(|s| (" final", s))) {
            for e in set.entries.iter().filter(|e| e.k == k) {
                let pts = values.iter().zip(&e.magnitudes.normalized).map(|(l, m)| (*l, *m)).collect();
                series.push(Series::new(format!("{}{tag}", e.method), pts));
            }
        }
        art.plots.push((
            format!("spectrum_K{k}"),
            line_plot(&format!("K={k}"), "eigenvalue", "normalized magnitude", &series),
        ));
    }
    Ok(art)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sgs_core::generators::gen_caveman_variant;
    use sgs_core::sgs::LnVxConfig;
    use sgs_core::signal::task3_init;

    #[test]
    fn caveman_spectrum_has_six_by_five_vectors() {
        let g = gen_caveman_variant().graph;
        let cfg = SgsConfig {
            ln_vx: LnVxConfig {
                trials: 1,
                epochs: 20,
                ..LnVxConfig::default()
            },
            ..SgsConfig::default()
        };
        let s = GraphSignal::from(task3_init());
        let art = spectrum(&g, &s, None, &cfg).unwrap();
        let t = art.get("spectrum").unwrap();
        assert_eq!(t.rows.len(), 6 * 5 * 13);
        assert_eq!(art.plots.len(), 6);
        assert!(t.rows.iter().any(|r| r[6].contains("zero_eigen")));
    }

    #[test]
    fn stratify_writes_documents() {
        let g = gen_caveman_variant().graph;
        let art = stratify(&g).unwrap();
        assert_eq!(art.get("stats").unwrap().rows.len(), 6);
        assert_eq!(art.documents.len(), 2);
    }
}
