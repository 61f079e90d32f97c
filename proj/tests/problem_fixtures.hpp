#pragma once
// Hand-built fixture problems shared across the test suites.

#include "orgnet/core.hpp"
#include "orgnet/netcode.hpp"

namespace testfix {

// Butterfly with one size-2 message to both receivers.
inline orgnet::Problem butterfly_problem(
    orgnet::SenderReplication mode = orgnet::SenderReplication::Strict) {
    orgnet::Problem p;
    p.graph = orgnet::butterfly_graph();
    p.broadcasts = {{"b1", {{"S", {"R1", "R2"}, 2.0}}}};
    p.sender_replication = mode;
    return p;
}

// Two vertex-disjoint relay paths to two receivers, one size-2 message to
// both. Strict replication makes this infeasible; relaxed costs 8.
inline orgnet::Problem two_paths_problem(orgnet::SenderReplication mode) {
    orgnet::Problem p;
    p.graph.nodes = {{"S", orgnet::NodeKind::Sender},
                     {"A", orgnet::NodeKind::Relay},
                     {"B", orgnet::NodeKind::Relay},
                     {"R1", orgnet::NodeKind::Receiver},
                     {"R2", orgnet::NodeKind::Receiver}};
    p.graph.edges = {{"S", "A", 1.0}, {"A", "R1", 1.0}, {"S", "B", 1.0}, {"B", "R2", 1.0}};
    p.broadcasts = {{"b1", {{"S", {"R1", "R2"}, 2.0}}}};
    p.sender_replication = mode;
    return p;
}

inline orgnet::Problem single_edge_problem(double cost = 1.0, double size = 1.0) {
    orgnet::Problem p;
    p.graph.nodes = {{"S", orgnet::NodeKind::Sender}, {"T", orgnet::NodeKind::Receiver}};
    p.graph.edges = {{"S", "T", cost}};
    p.broadcasts = {{"b1", {{"S", {"T"}, size}}}};
    return p;
}

}  // namespace testfix
