use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use therminfo_core::Engine;
use therminfo_server::{router, AppState, ADMIN_TOKEN_HEADER};

const TOKEN: &str = "test-token";

fn app_with(ui: Option<&std::path::Path>) -> Router {
    router(
        AppState {
            engine: Arc::new(Engine::with_fixtures()),
            admin_token: Some(Arc::from(TOKEN)),
        },
        ui,
    )
}

fn app() -> Router {
    app_with(None)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>, token: Option<&str>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header(ADMIN_TOKEN_HEADER, t);
    }
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::String(String::from_utf8_lossy(&bytes).into()));
    (status, value)
}

#[tokio::test]
async fn predict_reproduces_feature_table() {
    let app = app();
    let (status, body) = call(&app, "POST", "/api/predict", Some(json!({"smiles": "CCC1CCCCC1"})), None).await;
    assert_eq!(status, StatusCode::OK);
    let rows: Vec<(String, u64)> = body["features"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["code"].as_str().unwrap().to_string(), r["frequency"].as_u64().unwrap()))
        .collect();
    let expected = [
        ("C1C2", 1),
        ("C2C2", 4),
        ("C2C3", 3),
        ("C1H", 3),
        ("C2H", 12),
        ("C3H", 1),
        ("ZS6C2", 5),
        ("ZS6C3", 1),
    ];
    assert_eq!(rows, expected.map(|(c, n)| (c.to_string(), n)));
    assert_eq!(body["experimental"]["molecular_id"], "C000033");
}

#[tokio::test]
async fn out_of_domain_is_422_with_reasons() {
    let app = app();
    let (status, body) = call(&app, "POST", "/api/predict", Some(json!({"smiles": "CCO"})), None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "out_of_domain");
    assert_eq!(body["details"]["reasons"], json!(["non-hydrocarbon"]));
    let (status, body) = call(&app, "POST", "/api/predict", Some(json!({"smiles": "c1ccc2ccccc2c1"})), None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["details"]["reasons"], json!(["fused-ring"]));
}

#[tokio::test]
async fn validation_and_not_found_errors() {
    let app = app();
    let (status, body) = call(&app, "GET", "/api/compounds/C999999", None, None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "not_found");
    let (status, body) = call(&app, "POST", "/api/predict", Some(json!({"smiles": "C1CC("})), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "invalid_structure");
    let (status, body) = call(
        &app,
        "POST",
        "/api/search/structure",
        Some(json!({"smiles": "CC", "threshold_percent": 72})),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "invalid_threshold");
    let (status, _) = call(&app, "POST", "/api/predict", Some(json!("not an object")), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn compound_detail_and_quick_search() {
    let app = app();
    let (status, body) = call(&app, "GET", "/api/compounds/C001332", None, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["casrn"], "2892-51-5");
    assert_eq!(body["thermo"][0], json!({"kind": "formation_cr", "value": -596.2, "uncertainty": 0.4}));
    let (_, body) = call(&app, "GET", "/api/search?mode=quick&q=dihydroxycyclobutenedion", None, None).await;
    assert_eq!(body["mode"], "name");
    assert_eq!(body["hits"][0]["molecular_id"], "C001332");
    let (_, body) = call(&app, "GET", "/api/search?q=H4C", None, None).await;
    assert_eq!(body["mode"], "formula");
    assert_eq!(body["hits"][0]["name"], "Methane");
    let (_, body) = call(&app, "GET", "/api/search?mode=quick&q=2892-51-5", None, None).await;
    assert_eq!(body["mode"], "casrn");
    assert_eq!(body["total"], 1);
}

#[tokio::test]
async fn structure_and_advanced_search() {
    let app = app();
    let (_, body) = call(
        &app,
        "POST",
        "/api/search/structure",
        Some(json!({"smiles": "C2CCCCC2", "threshold_percent": 100})),
        None,
    )
    .await;
    assert_eq!(body["hits"][0]["name"], "Cyclohexane");
    let (_, body) = call(&app, "POST", "/api/search/substructure", Some(json!({"smiles": "c1ccccc1"})), None).await;
    assert!(body["total"].as_u64().unwrap() >= 13);
    let (_, body) = call(
        &app,
        "POST",
        "/api/search/advanced",
        Some(json!({"characteristics": ["Alcohol"], "class": "02 - Ring Systems Containing Only Isolated Non-Benzenoid Rings"})),
        None,
    )
    .await;
    let ids: Vec<&str> = body["hits"].as_array().unwrap().iter().map(|h| h["molecular_id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["C001290", "C001332", "C001358", "C001359"]);
    let (status, _) = call(&app, "POST", "/api/search/advanced", Some(json!({})), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn admin_routes_need_the_token() {
    let app = app();
    let (status, body) = call(&app, "GET", "/api/admin/pending", None, None).await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    assert_eq!(body["code"], "unauthorized");
    let (status, _) = call(&app, "GET", "/api/admin/pending", None, Some("wrong")).await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    let (status, _) = call(&app, "POST", "/api/admin/pending/S000001/approve", None, None).await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    let (status, _) = call(&app, "GET", "/api/admin/audit", None, Some(TOKEN)).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn submission_review_flow() {
    let app = app();
    let compound = json!({"name": "Cyclooctane", "smiles": "C1CCCCCCC1", "physical_state": "liquid"});
    let (status, sub) = call(&app, "POST", "/api/submissions", Some(json!({"submitter": "ana", "compound": compound})), None).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(sub["status"], "pending");
    let id = sub["id"].as_str().unwrap().to_string();

    let (_, hits) = call(&app, "GET", "/api/search?mode=formula&q=C8H16", None, None).await;
    assert_eq!(hits["total"], 2);

    let (_, pending) = call(&app, "GET", "/api/admin/pending", None, Some(TOKEN)).await;
    assert_eq!(pending.as_array().unwrap().len(), 1);

    let uri = format!("/api/admin/pending/{id}/approve");
    let (status, done) = call(&app, "POST", &uri, None, Some(TOKEN)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(done["status"], "approved");
    let (status, again) = call(&app, "POST", &uri, Some(json!({"note": "again"})), Some(TOKEN)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(again["code"], "already_decided");

    let (_, hits) = call(&app, "GET", "/api/search?mode=formula&q=C8H16", None, None).await;
    assert_eq!(hits["total"], 3);

    let bad = json!({"submitter": "ana", "compound": {"name": "x", "smiles": "CC", "casrn": "67-56-2"}});
    let (status, err) = call(&app, "POST", "/api/submissions", Some(bad), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["code"], "validation_failed");
    assert_eq!(err["field"], "casrn");
}

#[tokio::test]
async fn stats_and_casrn() {
    let app = app();
    let (_, stats) = call(&app, "GET", "/api/stats", None, None).await;
    assert_eq!(stats["compounds"], 55);
    let (_, check) = call(&app, "GET", "/api/casrn/67-56-1", None, None).await;
    assert_eq!(check["valid"], true);
}

#[tokio::test]
async fn serves_ui_bundle() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<html>therminfo</html>").unwrap();
    let app = app_with(Some(dir.path()));
    let (status, body) = call(&app, "GET", "/ui/", None, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, Value::String("<html>therminfo</html>".into()));
    let (status, _) = call(&app, "GET", "/api/nothing-here", None, None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}
