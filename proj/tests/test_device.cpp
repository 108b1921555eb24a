#include "doctest.h"

#include <nlohmann/json.hpp>

#include "helpers.hpp"

using namespace qptrace;

TEST_CASE("build_channels orders drives then controls") {
    Device dev;
    dev.name = "d2";
    dev.n_qubits = 2;
    dev.couplings = {{0, 1}, {1, 0}};
    auto chans = build_channels(dev);
    REQUIRE(chans.size() == 4);
    CHECK(chans[0] == Channel{ChannelKind::Drive, 0});
    CHECK(chans[1] == Channel{ChannelKind::Drive, 1});
    CHECK(chans[2] == Channel{ChannelKind::Control, 0});
    CHECK(chans[3] == Channel{ChannelKind::Control, 1});
}

TEST_CASE("T-shape device has 13 channels") {
    Device dev = standard_topology(TopologyKind::TShape5, 5);
    CHECK(dev.couplings.size() == 8);
    CHECK(build_channels(dev).size() == 13);
}

TEST_CASE("single-qubit device has one drive channel") {
    Device dev;
    dev.name = "d1";
    dev.n_qubits = 1;
    auto chans = build_channels(dev);
    REQUIRE(chans.size() == 1);
    CHECK(chans[0] == Channel{ChannelKind::Drive, 0});
}

TEST_CASE("channel count always equals n_qubits plus couplings") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        int n = rng.uniform_int(1, 8);
        Device dev = standard_topology(TopologyKind::Line, n);
        CHECK(build_channels(dev).size() == size_t(dev.n_qubits + dev.couplings.size()));
    }
}

TEST_CASE("enumerate_labels covers gates and couplings") {
    Device dev;
    dev.name = "d2";
    dev.n_qubits = 2;
    dev.couplings = {{0, 1}, {1, 0}};
    auto labels = enumerate_labels(dev);
    int pulse_singles = 0, rz = 0, cx = 0;
    for (const Label& l : labels) {
        if (l.gate == GateKind::CX) ++cx;
        else if (l.gate == GateKind::RZ) ++rz;
        else ++pulse_singles;
    }
    CHECK(pulse_singles == 6);  // I, X, SX per qubit
    CHECK(rz == 2);
    CHECK(cx == 2);

    SUBCASE("no two labels share gate and qubits") {
        for (size_t i = 0; i < labels.size(); ++i)
            for (size_t j = i + 1; j < labels.size(); ++j)
                CHECK(!(labels[i] == labels[j]));
    }
}

TEST_CASE("restricted availability reproduces the hypothetical device") {
    Device dev;
    dev.name = "hypo2";
    dev.n_qubits = 2;
    auto labels = enumerate_labels(dev, qptest::figure_availability());
    REQUIRE(labels.size() == 3);
    CHECK(labels[0] == make_single_qubit_label(GateKind::X, 0));
    CHECK(labels[1] == make_single_qubit_label(GateKind::SX, 0));
    CHECK(labels[2] == make_single_qubit_label(GateKind::X, 1));
}

TEST_CASE("one-qubit label set") {
    Device dev;
    dev.name = "d1";
    dev.n_qubits = 1;
    auto labels = enumerate_labels(dev);
    REQUIRE(labels.size() == 4);
    CHECK(labels[0].gate == GateKind::I);
    CHECK(labels[1].gate == GateKind::X);
    CHECK(labels[2].gate == GateKind::SX);
    CHECK(labels[3].gate == GateKind::RZ);
    CHECK(labels[3].is_virtual());
}

TEST_CASE("CX label control channel matches coupling position") {
    Device dev = standard_topology(TopologyKind::TShape5, 5);
    for (const Label& l : enumerate_labels(dev)) {
        if (l.gate != GateKind::CX) continue;
        int expect = dev.coupling_index(l.qubits[0], l.qubits[1]);
        bool found = false;
        for (Channel c : l.channels)
            if (c.kind == ChannelKind::Control) {
                CHECK(c.index == expect);
                found = true;
            }
        CHECK(found);
    }
}

TEST_CASE("standard topologies") {
    Device line = standard_topology(TopologyKind::Line, 3);
    std::vector<std::pair<int, int>> expect = {{0, 1}, {1, 0}, {1, 2}, {2, 1}};
    CHECK(line.couplings == expect);

    Device t5 = standard_topology(TopologyKind::TShape5, 5);
    CHECK(t5.couplings.size() == 8);
    CHECK(t5.has_coupling(1, 3));
    CHECK(t5.has_coupling(3, 4));

    Device h7 = standard_topology(TopologyKind::HShape7, 7);
    CHECK(h7.couplings.size() == 12);
    CHECK(h7.has_coupling(3, 5));
    CHECK(h7.has_coupling(5, 6));

    CHECK_THROWS_AS(standard_topology(TopologyKind::TShape5, 4), ValidationError);
    CHECK_THROWS_AS(standard_topology(TopologyKind::HShape7, 5), ValidationError);
}

TEST_CASE("device validation rejects bad couplings") {
    Device dev;
    dev.name = "bad";
    dev.n_qubits = 2;

    dev.couplings = {{0, 2}};
    CHECK_THROWS_AS(dev.validate(), ValidationError);

    dev.couplings = {{1, 1}};
    CHECK_THROWS_AS(dev.validate(), ValidationError);

    dev.couplings = {{0, 1}, {0, 1}};
    CHECK_THROWS_AS(dev.validate(), ValidationError);
}

TEST_CASE("device JSON round trip") {
    Device dev = standard_topology(TopologyKind::TShape5, 5);
    Device back = device_from_json(device_to_json(dev));
    CHECK(back.name == dev.name);
    CHECK(back.n_qubits == dev.n_qubits);
    CHECK(back.couplings == dev.couplings);

    nlohmann::json bad = device_to_json(dev);
    bad["couplings"].push_back(7);
    CHECK_THROWS_AS(device_from_json(bad), FormatError);
}
