//! HTTP routing over [`Api`]. Handlers only extract, delegate and
//! serialize.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use daisen_core::api::{Api, ApiError, Params, GEN_HEADER, GEN_PARAM};
use daisen_core::{Error, Result};
use serde::Serialize;

pub const BIND_ENV: &str = "DAISEN_BIND";
pub const DEFAULT_BIND: &str = "127.0.0.1:3001";

type Shared = State<Arc<Api>>;
type Q = Query<Params>;

pub fn router(api: Arc<Api>) -> Router {
    Router::new()
        .route("/", get(index))
        .route("/api/meta", get(meta))
        .route("/api/components", get(components))
        .route("/api/metrics", get(metrics))
        .route("/api/tasks-layout", get(tasks_layout))
        .route("/api/task/{id}", get(task))
        .route("/api/task/{id}/children", get(children))
        .route("/api/task/{id}/parents", get(parents))
        .route("/api/render.svg", get(render))
        .with_state(api)
}

fn with_gen(params: &Params, mut resp: Response) -> Response {
    if let Some(v) = params.get(GEN_PARAM).and_then(|g| HeaderValue::from_str(g).ok()) {
        resp.headers_mut().insert(GEN_HEADER, v);
    }
    resp
}

fn error_response(e: Error) -> Response {
    let body = ApiError::from(e);
    let status = StatusCode::from_u16(body.http_status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, Json(body)).into_response()
}

fn json<T: Serialize>(params: &Params, r: Result<T>) -> Response {
    let resp = match r {
        Ok(v) => Json(v).into_response(),
        Err(e) => error_response(e),
    };
    with_gen(params, resp)
}

/// Runs a handler off the async workers; layout and metrics over large
/// windows are CPU bound.
async fn blocking<T, F>(api: Arc<Api>, f: F) -> Result<T>
where
    T: Send + 'static,
    F: FnOnce(&Api) -> Result<T> + Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&api))
        .await
        .unwrap_or_else(|e| Err(Error::Io(std::io::Error::other(e.to_string()))))
}

async fn index() -> Html<&'static str> {
    Html(include_str!("index.html"))
}

async fn meta(State(api): Shared, Query(p): Q) -> Response {
    json(&p, Ok(api.meta()))
}

async fn components(State(api): Shared, Query(p): Q) -> Response {
    json(&p, api.components(&p))
}

async fn metrics(State(api): Shared, Query(p): Q) -> Response {
    let q = p.clone();
    json(&p, blocking(api, move |a| a.metrics(&q)).await)
}

async fn tasks_layout(State(api): Shared, Query(p): Q) -> Response {
    let q = p.clone();
    json(&p, blocking(api, move |a| a.tasks_layout(&q)).await)
}

async fn task(State(api): Shared, Path(id): Path<String>, Query(p): Q) -> Response {
    json(&p, api.task(&id))
}

async fn children(State(api): Shared, Path(id): Path<String>, Query(p): Q) -> Response {
    json(&p, api.children(&id))
}

async fn parents(State(api): Shared, Path(id): Path<String>, Query(p): Q) -> Response {
    json(&p, api.parents(&id))
}

async fn render(State(api): Shared, Query(p): Q) -> Response {
    let q = p.clone();
    let resp = match blocking(api, move |a| a.render(&a.view_spec(&q)?)).await {
        Ok(svg) => ([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response(),
        Err(e) => error_response(e),
    };
    with_gen(&p, resp)
}

/// Serves until Ctrl-C.
pub async fn serve(api: Arc<Api>, bind: &str) -> Result<()> {
    let addr: SocketAddr = bind
        .parse()
        .map_err(|e| Error::Bind(format!("`{bind}`: {e}")))?;
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| Error::Bind(format!("{addr}: {e}")))?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(api))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
