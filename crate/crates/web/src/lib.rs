//! Browser bindings for three demo operations: cross-sections of inverted
//! catenoids, a residual explorer and the Möbius Björling strip.
//!
//! Build with `wasm-pack build crates/web --target web` and open
//! `crates/web/index.html` through any static file server.

use wasm_bindgen::prelude::*;

pub mod demo;

fn js_err(e: statsurf::GeomError) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct SectionView(demo::Section);

#[wasm_bindgen]
impl SectionView {
    #[wasm_bindgen(getter)]
    pub fn xz(&self) -> Vec<f64> {
        self.0.xz.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn starts(&self) -> Vec<u32> {
        self.0.starts.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn asymmetry(&self) -> f64 {
        self.0.asymmetry
    }
}

#[wasm_bindgen(js_name = catenoidSection)]
pub fn catenoid_section(offset: f64, height: f64, resolution: usize) -> Result<SectionView, JsError> {
    demo::catenoid_section(offset, height, resolution).map(SectionView).map_err(js_err)
}

#[wasm_bindgen]
pub struct ResidualView(demo::ResidualField);

#[wasm_bindgen]
impl ResidualView {
    #[wasm_bindgen(getter, js_name = nU)]
    pub fn n_u(&self) -> usize {
        self.0.n_u
    }

    #[wasm_bindgen(getter, js_name = nV)]
    pub fn n_v(&self) -> usize {
        self.0.n_v
    }

    #[wasm_bindgen(getter, js_name = logResidual)]
    pub fn log_residual(&self) -> Vec<f64> {
        self.0.log_residual.clone()
    }

    #[wasm_bindgen(getter, js_name = maxAbs)]
    pub fn max_abs(&self) -> f64 {
        self.0.max_abs
    }

    #[wasm_bindgen(getter, js_name = minAbs)]
    pub fn min_abs(&self) -> f64 {
        self.0.min_abs
    }

    #[wasm_bindgen(getter)]
    pub fn masked(&self) -> usize {
        self.0.masked
    }
}

#[wasm_bindgen(js_name = residualField)]
pub fn residual_field(spec: &str, alpha: f64, n_u: usize, n_v: usize) -> Result<ResidualView, JsError> {
    demo::residual_field(spec, alpha, n_u, n_v).map(ResidualView).map_err(js_err)
}

#[wasm_bindgen]
pub struct StripView(demo::Strip);

#[wasm_bindgen]
impl StripView {
    #[wasm_bindgen(getter)]
    pub fn positions(&self) -> Vec<f32> {
        self.0.positions.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn normals(&self) -> Vec<f32> {
        self.0.normals.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn triangles(&self) -> Vec<u32> {
        self.0.triangles.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn holonomy(&self) -> i32 {
        self.0.holonomy
    }

    #[wasm_bindgen(getter, js_name = maxAbsResidual)]
    pub fn max_abs_residual(&self) -> f64 {
        self.0.max_abs_residual
    }
}

#[wasm_bindgen(js_name = mobiusStrip)]
pub fn mobius_strip(stationary: bool, n_s: usize, n_t: usize) -> Result<StripView, JsError> {
    demo::mobius_strip(stationary, n_s, n_t).map(StripView).map_err(js_err)
}
