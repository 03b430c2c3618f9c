use std::fmt::Write;

use crate::levelset::mesh::LevelSetMesh;

/// Decimal float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row per facet: vertex coordinates, area and weight sample.
pub fn mesh_to_csv(mesh: &LevelSetMesh) -> String {
    let n = mesh.dim;
    let mut out = String::new();
    let mut header: Vec<String> = Vec::new();
    for v in 0..n {
        for a in 0..n {
            header.push(format!("v{v}_x{}", a + 1));
        }
    }
    header.push("area".into());
    header.push("weight".into());
    out.push_str(&header.join(","));
    out.push('\n');
    for f in &mesh.facets {
        let mut row: Vec<String> = Vec::with_capacity(n * n + 2);
        for v in f.vertices(n) {
            row.extend(v[..n].iter().map(|&x| format_float(x)));
        }
        row.push(format_float(f.area));
        row.push(format_float(f.weight));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// OFF text: a vertex list followed by faces (triangles, or segments when
/// n = 2). Vertices are not shared between facets.
pub fn mesh_to_off(mesh: &LevelSetMesh) -> String {
    let n = mesh.dim;
    let mut out = String::new();
    let _ = writeln!(out, "OFF");
    let _ = writeln!(out, "{} {} 0", mesh.len() * n, mesh.len());
    for f in &mesh.facets {
        for v in f.vertices(n) {
            let _ = writeln!(
                out,
                "{} {} {}",
                format_float(v[0]),
                format_float(v[1]),
                format_float(v[2])
            );
        }
    }
    for i in 0..mesh.len() {
        let ids: Vec<String> = (0..n).map(|v| (i * n + v).to_string()).collect();
        let _ = writeln!(out, "{} {}", n, ids.join(" "));
    }
    out
}
