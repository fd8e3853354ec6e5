//! HTTP and WebSocket endpoints.

use std::net::SocketAddr;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use futures::{SinkExt, StreamExt};
use tokio::net::TcpListener;
use tokio::sync::mpsc;

use crate::hub::{detached_error, Hub};
use crate::wire::WireMessage;

pub fn router(hub: Hub) -> Router {
    Router::new()
        .route("/ws", get(ws_handler))
        .route("/map", get(map_handler))
        .route("/health", get(|| async { "ok" }))
        .with_state(hub)
}

async fn map_handler(State(hub): State<Hub>) -> Response {
    Json(hub.config().map.clone()).into_response()
}

async fn ws_handler(ws: WebSocketUpgrade, State(hub): State<Hub>) -> Response {
    ws.on_upgrade(move |socket| connection(socket, hub))
}

/// One client connection. It may address any number of sessions.
async fn connection(socket: WebSocket, hub: Hub) {
    let (mut sink, mut stream) = socket.split();
    let (tx, mut rx) = mpsc::unbounded_channel::<Vec<WireMessage>>();
    let writer = tokio::spawn(async move {
        while let Some(batch) = rx.recv().await {
            for m in batch {
                if sink.send(Message::Text(m.to_json())).await.is_err() {
                    return;
                }
            }
        }
    });
    while let Some(Ok(frame)) = stream.next().await {
        match frame {
            Message::Text(text) => match WireMessage::parse(&text) {
                Ok(message) => hub.dispatch(message, tx.clone()),
                Err(e) => {
                    let _ = tx.send(vec![detached_error(&e, "", None)]);
                }
            },
            Message::Close(_) => break,
            _ => {}
        }
    }
    drop(tx);
    let _ = writer.await;
}

/// Binds and serves until the process ends. Returns the bound address
/// through `bound` before serving.
pub async fn serve(hub: Hub, addr: SocketAddr, bound: impl FnOnce(SocketAddr)) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    bound(listener.local_addr()?);
    axum::serve(listener, router(hub)).await
}
