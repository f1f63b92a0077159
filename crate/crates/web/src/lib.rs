//! wasm-bindgen surface for the browser demo. Every export takes and
//! returns JSON text so the page stays framework-free.

use extmcg::ambient_geom;
use extmcg::classifier::{self, KnotFamily};
use extmcg::sl2z::{self, UniModMat2};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Normal-form word for `{"rows": [[a, b], [c, d]]}`, with membership and mod-2 class.
pub fn decompose_json(matrix: &str) -> Result<String, String> {
    let m = UniModMat2::from_json(matrix).map_err(|e| e.to_string())?;
    let class = sl2z::reduce_mod2(&m).to_string();
    let out = match sl2z::decompose(&m) {
        Ok(w) => json!({ "member": true, "class": class, "word": w.to_string() }),
        Err(_) => json!({ "member": false, "class": class, "word": null }),
    };
    Ok(out.to_string())
}

/// An ambient matrix (`omega`, `hat` or `double`) and its action on `H_p(S^p × S^p)`.
pub fn omega_json(kind: &str, p: usize) -> Result<String, String> {
    let m = match kind {
        "omega" => ambient_geom::build_omega(p),
        "hat" => ambient_geom::build_omega_hat(p),
        "double" => ambient_geom::build_double_reflection(p),
        other => return Err(format!("unknown kind `{other}`")),
    }
    .map_err(|e| e.to_string())?;
    let d = ambient_geom::restrict_to_product(&m, p, p).map_err(|e| e.to_string())?;
    let a = ambient_geom::induced_homology_action(&d).map_err(|e| e.to_string())?;
    Ok(json!({
        "dense": m.to_string(),
        "det": m.det(),
        "order": m.order(64),
        "action": a.0,
        "descriptor": d,
    })
    .to_string())
}

/// Classification of a family given as `{"kind": "equal-product", "p": 4}`.
pub fn classify_json(family: &str) -> Result<String, String> {
    let f: KnotFamily = serde_json::from_str(family).map_err(|e| e.to_string())?;
    let r = classifier::classify(&f).map_err(|e| e.to_string())?;
    Ok(r.to_json())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn decompose(matrix: &str) -> Result<String, JsValue> {
    js(decompose_json(matrix))
}

#[wasm_bindgen]
pub fn omega(kind: &str, p: usize) -> Result<String, JsValue> {
    js(omega_json(kind, p))
}

#[wasm_bindgen]
pub fn classify(family: &str) -> Result<String, JsValue> {
    js(classify_json(family))
}
