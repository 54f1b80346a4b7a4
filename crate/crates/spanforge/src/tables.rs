//! CSV outputs. All tables have a header row and use `.` as decimal
//! separator; infinite values are written as `inf`.

use std::io::Write;

use spanforge_core::apsp::DistanceMatrix;
use spanforge_core::oracle::{SizeStats, StretchAudit};
use spanforge_core::{EdgeMask, WeightedGraph};

fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        x.to_string()
    }
}

/// `edge,u,v,w,in_spanner,spanner_distance,ratio,pass`
pub fn write_audit<W: Write>(
    g: &WeightedGraph,
    spanner: &EdgeMask,
    audit: &StretchAudit,
    out: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "edge",
        "u",
        "v",
        "w",
        "in_spanner",
        "spanner_distance",
        "ratio",
        "pass",
    ])?;
    let failing: std::collections::BTreeSet<_> = audit.failing.iter().copied().collect();
    for id in g.edge_ids() {
        let e = g.edge(id);
        w.write_record([
            id.0.to_string(),
            e.u.to_string(),
            e.v.to_string(),
            num(e.w),
            spanner.contains(id).to_string(),
            num(audit.distances[id.index()]),
            num(audit.ratios[id.index()]),
            (!failing.contains(&id)).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-trial extra columns appended by `study --apsp`.
#[derive(Clone, Debug, PartialEq)]
pub struct ApspColumns {
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

/// `trial,seed,n,m,size,size_ratio,clusters_e1..clusters_eL[,apsp_max_ratio,apsp_mean_ratio]`
pub fn write_study<W: Write>(
    stats: &SizeStats,
    apsp: Option<&[ApspColumns]>,
    out: W,
) -> csv::Result<()> {
    let epochs = stats.epoch_clusters.iter().map(Vec::len).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["trial", "seed", "n", "m", "size", "size_ratio"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=epochs).map(|i| format!("clusters_e{i}")));
    if apsp.is_some() {
        header.push("apsp_max_ratio".into());
        header.push("apsp_mean_ratio".into());
    }
    w.write_record(&header)?;
    for i in 0..stats.trials {
        let ratio = if stats.size_reference > 0.0 {
            stats.sizes[i] as f64 / stats.size_reference
        } else {
            0.0
        };
        let mut row = vec![
            i.to_string(),
            stats.seeds[i].to_string(),
            stats.n[i].to_string(),
            stats.m[i].to_string(),
            stats.sizes[i].to_string(),
            num(ratio),
        ];
        for e in 0..epochs {
            row.push(
                stats.epoch_clusters[i]
                    .get(e)
                    .map(|c| c.to_string())
                    .unwrap_or_default(),
            );
        }
        if let Some(cols) = apsp {
            row.push(num(cols[i].max_ratio));
            row.push(num(cols[i].mean_ratio));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `source,0,1,...,n-1`, one row per source vertex.
pub fn write_matrix<W: Write>(d: &DistanceMatrix, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["source".to_string()];
    header.extend((0..d.n).map(|v| v.to_string()));
    w.write_record(&header)?;
    for u in 0..d.n {
        let mut row = vec![u.to_string()];
        row.extend(d.row(u).iter().map(|&x| num(x)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use spanforge_core::oracle::audit_stretch;

    #[test]
    fn audit_rows_and_inf() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 0.5)]).unwrap();
        let mask = EdgeMask::from_ids(2, &[spanforge_core::EdgeId(0)]);
        let audit = audit_stretch(&g, &mask, 2.0);
        let mut buf = Vec::new();
        write_audit(&g, &mask, &audit, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "edge,u,v,w,in_spanner,spanner_distance,ratio,pass"
        );
        assert_eq!(lines[1], "0,0,1,1,true,1,1,true");
        assert_eq!(lines[2], "1,1,2,0.5,false,inf,inf,false");
    }

    #[test]
    fn matrix_layout() {
        let d = DistanceMatrix::from_rows(vec![vec![0.0, 2.5], vec![2.5, 0.0]]);
        let mut buf = Vec::new();
        write_matrix(&d, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "source,0,1\n0,0,2.5\n1,2.5,0\n"
        );
    }
}
