"""
Tests for server-side futures: dispatch, resolve, cancel, idempotency,
ownership and retention. Integration tests run over loopback and TCP.
"""

import asyncio
import uuid
from contextlib import AsyncExitStack

import pytest
import pytest_asyncio

from Bebop.RPC.client import resolve_method
from Bebop.RPC.errors import RpcError
from Bebop.RPC.futures import FutureRecord, FutureState, InMemoryFutureStore
from Bebop.RPC.messages import BatchCall, BatchRequest, BatchResponse, FutureResult, FutureSuccess, decode_message
from Bebop.RPC.status import StatusCode
from Bebop.WIRE.temporal import WireDuration, WireTimestamp
from support import loopback_client, make_server, pack_int, tcp_client, unpack_int

INC = resolve_method("/Test/Inc")
HANG = resolve_method("/Test/Hang")
COUNT = resolve_method("/Test/Count")


def inc_call(value: int) -> BatchCall:
    return BatchCall(method_id=INC, payload=pack_int(value))


def slow_batch(seconds: float) -> BatchRequest:
    """A batch that finishes after `seconds` of wall time, when its hanging call times out."""
    return BatchRequest(
        calls=[BatchCall(method_id=HANG, payload=b"")],
        deadline=WireTimestamp.now().plus(WireDuration.from_seconds(seconds)),
    )


async def resolve_all(client, ids):
    return [result async for result in client.resolve_futures(ids)]


async def expect_status(awaitable, status):
    with pytest.raises(RpcError) as excinfo:
        await awaitable
    assert excinfo.value.status == status


@pytest.fixture(params=["loopback", "tcp"])
def transport(request):
    return request.param


@pytest_asyncio.fixture
async def connect(transport):
    """`await connect(server, name)` opens a client; `name` is the loopback caller identity."""
    async with AsyncExitStack() as stack:
        seen = set()

        async def open_client(server, name: str):
            if id(server) not in seen:
                seen.add(id(server))
                stack.push_async_callback(server.close)
            if transport == "loopback":
                return await stack.enter_async_context(loopback_client(server, client_address=name))
            return await stack.enter_async_context(tcp_client(server))

        yield open_client


# =============================================================================
# Dispatch and resolve
# =============================================================================

@pytest.mark.integration
class TestDispatchResolve:
    """The basic lifecycle."""

    @pytest.mark.asyncio
    async def test_unary_future(self, connect):
        print("\n🧪 Dispatching a future and resolving it...")
        client = await connect(make_server(), "alice")
        future_id = await client.dispatch_future(call=inc_call(41))
        assert future_id.version == 4
        results = await resolve_all(client, [future_id])
        assert len(results) == 1
        assert results[0].id == future_id
        assert results[0].succeeded
        assert unpack_int(results[0].outcome.payload) == 42
        print("✅ Future resolved with its result")

    @pytest.mark.asyncio
    async def test_batch_future(self, connect):
        client = await connect(make_server(), "alice")
        batch = BatchRequest(calls=[inc_call(1), BatchCall(method_id=INC, input_from=0)])
        future_id = await client.dispatch_future(batch=batch)
        (result,) = await resolve_all(client, [future_id])
        response = decode_message(BatchResponse, result.outcome.payload)
        assert [unpack_int(item.responses[0]) for item in response.results] == [2, 3]

    @pytest.mark.asyncio
    async def test_failed_inner_call(self, connect):
        client = await connect(make_server(), "alice")
        future_id = await client.dispatch_future(call=BatchCall(method_id=resolve_method("/Test/Fail"), payload=b""))
        (result,) = await resolve_all(client, [future_id])
        assert not result.succeeded
        assert result.outcome.message == "refused"

    @pytest.mark.asyncio
    async def test_resolve_several(self, connect):
        client = await connect(make_server(), "alice")
        ids = [await client.dispatch_future(call=inc_call(value)) for value in range(3)]
        results = await resolve_all(client, ids)
        assert {result.id for result in results} == set(ids)
        assert sorted(unpack_int(result.outcome.payload) for result in results) == [1, 2, 3]

    @pytest.mark.asyncio
    async def test_resolve_unknown(self, connect):
        client = await connect(make_server(), "alice")
        await expect_status(resolve_all(client, [uuid.uuid4()]), StatusCode.NOT_FOUND)

    @pytest.mark.asyncio
    @pytest.mark.parametrize(
        "kwargs",
        [
            {},
            {"call": BatchCall(method_id=INC, payload=b""), "batch": BatchRequest()},
            {"call": BatchCall(method_id=COUNT, payload=b"")},
            {"call": BatchCall(method_id=0x0BAD_F00D, payload=b"")},
        ],
        ids=["neither", "both", "server-stream", "unknown"],
    )
    async def test_malformed_dispatch(self, connect, kwargs):
        client = await connect(make_server(), "alice")
        await expect_status(client.dispatch_future(**kwargs), StatusCode.INVALID_ARGUMENT)

    @pytest.mark.asyncio
    async def test_dispatch_does_not_wait(self, connect):
        server = make_server()
        client = await connect(server, "alice")
        future_id = await asyncio.wait_for(client.dispatch_future(call=BatchCall(method_id=HANG, payload=b"")), 5)
        assert server.futures.get(future_id).state is FutureState.PENDING


# =============================================================================
# Idempotency and ownership
# =============================================================================

@pytest.mark.integration
class TestIdempotency:
    """Repeated dispatches with one key."""

    @pytest.mark.asyncio
    async def test_same_key_same_future(self, connect):
        server = make_server()
        client = await connect(server, "alice")
        key = uuid.uuid4()
        first = await client.dispatch_future(call=inc_call(1), idempotency_key=key)
        await resolve_all(client, [first])
        second = await client.dispatch_future(call=inc_call(1), idempotency_key=key)
        assert second == first
        assert server.calls.counts["Inc"] == 1

    @pytest.mark.asyncio
    async def test_key_is_per_caller(self, connect):
        server = make_server()
        alice = await connect(server, "alice")
        bob = await connect(server, "bob")
        key = uuid.uuid4()
        first = await alice.dispatch_future(call=inc_call(1), idempotency_key=key)
        second = await bob.dispatch_future(call=inc_call(1), idempotency_key=key)
        assert first != second

    @pytest.mark.asyncio
    async def test_cancel_releases_key(self, connect):
        print("\n🧪 Cancelling a future and reusing its key...")
        client = await connect(make_server(), "alice")
        key = uuid.uuid4()
        first = await client.dispatch_future(call=BatchCall(method_id=HANG, payload=b""), idempotency_key=key)
        await client.cancel_future(first)
        (result,) = await resolve_all(client, [first])
        assert result.outcome.code == StatusCode.CANCELLED
        second = await client.dispatch_future(call=inc_call(1), idempotency_key=key)
        assert second != first
        (result,) = await resolve_all(client, [second])
        assert unpack_int(result.outcome.payload) == 2
        print("✅ Key released after cancel")

    @pytest.mark.asyncio
    async def test_cancel_finished_future_is_a_no_op(self, connect):
        client = await connect(make_server(), "alice")
        future_id = await client.dispatch_future(call=inc_call(1))
        await resolve_all(client, [future_id])
        await client.cancel_future(future_id)
        (result,) = await resolve_all(client, [future_id])
        assert result.succeeded

    @pytest.mark.asyncio
    async def test_cancel_unknown(self, connect):
        client = await connect(make_server(), "alice")
        await expect_status(client.cancel_future(uuid.uuid4()), StatusCode.NOT_FOUND)


@pytest.mark.integration
class TestOwnership:
    """Another caller can neither see nor cancel a future."""

    @pytest.mark.asyncio
    async def test_resolve_other_callers_future(self, connect):
        server = make_server()
        alice = await connect(server, "alice")
        mallory = await connect(server, "mallory")
        future_id = await alice.dispatch_future(call=inc_call(1))
        await expect_status(resolve_all(mallory, [future_id]), StatusCode.PERMISSION_DENIED)

    @pytest.mark.asyncio
    async def test_cancel_other_callers_future(self, connect):
        server = make_server()
        alice = await connect(server, "alice")
        mallory = await connect(server, "mallory")
        future_id = await alice.dispatch_future(call=BatchCall(method_id=HANG, payload=b""))
        await expect_status(mallory.cancel_future(future_id), StatusCode.PERMISSION_DENIED)
        assert server.futures.get(future_id).state is FutureState.PENDING


# =============================================================================
# Retention
# =============================================================================

@pytest.mark.integration
class TestRetention:
    """Eviction-by-count and discarded results."""

    @pytest.mark.asyncio
    async def test_oldest_result_evicted(self, connect):
        server = make_server(retention=2)
        client = await connect(server, "alice")
        ids = []
        for value in range(3):
            future_id = await client.dispatch_future(call=inc_call(value))
            await resolve_all(client, [future_id])
            ids.append(future_id)
        assert await server.futures.store.load_result(ids[0]) is None
        assert (await server.futures.store.load_result(ids[2])).state is FutureState.COMPLETED
        await expect_status(resolve_all(client, [ids[0]]), StatusCode.NOT_FOUND)
        (result,) = await resolve_all(client, [ids[1]])
        assert unpack_int(result.outcome.payload) == 2

    @pytest.mark.asyncio
    async def test_evicted_key_starts_a_new_future(self, connect):
        server = make_server(retention=1)
        client = await connect(server, "alice")
        key = uuid.uuid4()
        first = await client.dispatch_future(call=inc_call(1), idempotency_key=key)
        await resolve_all(client, [first])
        other = await client.dispatch_future(call=inc_call(5))
        await resolve_all(client, [other])
        assert await client.dispatch_future(call=inc_call(1), idempotency_key=key) != first

    @pytest.mark.asyncio
    async def test_discarded_result_is_delivered_then_dropped(self, connect):
        print("\n🧪 Resolving a discard_result future while it runs...")
        server = make_server()
        client = await connect(server, "alice")
        future_id = await client.dispatch_future(batch=slow_batch(0.3), discard_result=True)
        (result,) = await resolve_all(client, [future_id])
        inner = decode_message(BatchResponse, result.outcome.payload)
        assert inner.results[0].status == StatusCode.DEADLINE_EXCEEDED
        assert await server.futures.store.load_result(future_id) is None
        await expect_status(resolve_all(client, [future_id]), StatusCode.NOT_FOUND)
        print("✅ Delivered once, never stored")

    @pytest.mark.asyncio
    async def test_resolve_without_ids_follows_new_futures(self, connect):
        client = await connect(make_server(), "alice")
        stream = client.resolve_futures()
        first = asyncio.ensure_future(stream.__anext__())
        await asyncio.sleep(0.05)
        future_id = await client.dispatch_future(batch=slow_batch(0.2))
        result = await asyncio.wait_for(first, 5)
        assert result.id == future_id
        await stream.aclose()


# =============================================================================
# Store
# =============================================================================

class TestInMemoryStore:
    """Direct state checks on the default store."""

    @pytest.mark.asyncio
    async def test_eviction_by_count(self):
        store = InMemoryFutureStore(retention=2)
        records = [FutureRecord(uuid.uuid4(), "owner", state=FutureState.COMPLETED) for _ in range(3)]
        for record in records:
            record.result = FutureResult(record.id, FutureSuccess(b""))
            await store.persist_result(record)
        assert await store.evict() == [records[0].id]
        assert await store.load_result(records[0].id) is None
        assert len(store) == 2

    def test_terminal_states(self):
        assert not FutureState.PENDING.terminal
        assert FutureState.COMPLETED.terminal
        assert FutureState.CANCELLED.terminal
