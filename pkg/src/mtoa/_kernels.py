"""Numba kernels for the slot loops.

Both kernels advance at most ``max_slots`` slots and return the number of
slots actually completed; they stop early (before starting a slot) whenever
a node that would need a random draw has exhausted its draw buffer, so a
partial slot is never committed. ``draws[i]`` holds pregenerated uniform
integers in [0, null_actions] for node ``i``; an entry is consumed only on
slots where that node's value row is all zero (the only case with a tie).

``act_out`` needs at least one row of width n: row ``t`` records the chosen
actions when ``record`` is set, otherwise row 0 is reused as scratch.

Arithmetic is IEEE double with no fastmath so a straight-line Python
re-implementation of the update rule produces bit-identical values.
"""

from numba import njit


@njit(cache=True)
def run_local_reward(q, successes, draws, cursors, buf_len, learning_rate,
                     reset_threshold, max_slots, record, act_out, winner_out,
                     ntx_out, q0_out, q0_count):
    """Local rewards: only a sole transmitter earns 1; the chosen entry is
    updated and reset to 0 when it lands at or below the threshold.

    ``q`` holds each node's transmit-entry value. Null entries stay 0
    forever under local rewards (their reward is always 0), so they are
    not materialized and their update/reset is a no-op.
    """
    n = q.shape[0]
    done = 0
    for t in range(max_slots):
        for i in range(n):
            if q[i] <= 0.0 and cursors[i] >= buf_len:
                return done
        row = t if record else 0
        ntx = 0
        winner = -1
        for i in range(n):
            if q[i] > 0.0:
                a = 0
            else:
                a = draws[i, cursors[i]]
                cursors[i] += 1
            act_out[row, i] = a
            if a == 0:
                ntx += 1
                winner = i
        success = ntx == 1
        if success:
            successes[winner] += 1
        for i in range(n):
            if act_out[row, i] == 0:
                r = 1.0 if (success and i == winner) else 0.0
                qi = q[i] + learning_rate * (r - q[i])
                if qi <= reset_threshold:
                    qi = 0.0
                q[i] = qi
        if record:
            winner_out[t] = winner
            ntx_out[t] = ntx
        if success and q0_out.shape[0] > q0_count[0]:
            q0_out[q0_count[0]] = q[winner]
            q0_count[0] += 1
        done += 1
    return done


@njit(cache=True)
def run_global_reward(entry_action, entry_value, window_count, successes,
                      draws, cursors, buf_len, learning_rate, window_limit,
                      max_slots, record, act_out, winner_out, ntx_out):
    """Global rewards: every node earns the network success indicator; an
    entry that has stayed positive for ``window_limit`` slots is forced
    back to 0 together with its counter.

    At most one entry per node is ever positive, tracked by
    (``entry_action``, ``entry_value``); ``entry_action < 0`` means the
    whole row is zero and the node draws its action.
    """
    n = entry_action.shape[0]
    done = 0
    for t in range(max_slots):
        for i in range(n):
            if entry_action[i] < 0 and cursors[i] >= buf_len:
                return done
        row = t if record else 0
        ntx = 0
        winner = -1
        for i in range(n):
            if entry_action[i] >= 0:
                a = entry_action[i]
            else:
                a = draws[i, cursors[i]]
                cursors[i] += 1
            act_out[row, i] = a
            if a == 0:
                ntx += 1
                winner = i
        success = ntx == 1
        if success:
            successes[winner] += 1
        r = 1.0 if success else 0.0
        for i in range(n):
            a = act_out[row, i]
            old = entry_value[i] if a == entry_action[i] else 0.0
            new = old + learning_rate * (r - old)
            if new > 0.0:
                window_count[i] += 1
                if window_count[i] == window_limit:
                    window_count[i] = 0
                    new = 0.0
            if new > 0.0:
                entry_action[i] = a
                entry_value[i] = new
            elif a == entry_action[i]:
                entry_action[i] = -1
                entry_value[i] = 0.0
        if record:
            winner_out[t] = winner
            ntx_out[t] = ntx
        done += 1
    return done
