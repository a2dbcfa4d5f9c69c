// Bundled case-study models. Element counts (components, nodes, scenarios,
// messages) follow the published case studies; demands, workloads and
// failure annotations are calibrated so that the models solve without
// saturation, loaded nodes sit between 0.3 and 0.8 utilization, and the
// trading-system model starts near 0.75 reliability. tools/render_fixtures
// regenerates models/ttbs.json and models/cocome.json from these builders.
#pragma once

#include <refopt/model.hpp>

namespace refopt {

// Train Ticket Booking Service: 11 microservice components on 11 docker
// nodes, 3 scenarios (login, update user details, rebook), 8 messages.
inline ArchModel ttbsFixture() {
    ArchModel m;

    auto addComp = [&m](const std::string& id, double theta,
                        std::vector<Operation> ops = {}) {
        Component c;
        c.id = id;
        c.failureProb = theta;
        c.operations = std::move(ops);
        m.components.push_back(std::move(c));
        m.deployment[id] = "node_" + id;
        m.nodes.push_back({"node_" + id, 1, 1.0});
    };

    addComp("gateway", 0.05,
            {{"route_login", 0.15}, {"route_update", 0.15}, {"route_rebook", 0.15}});
    addComp("auth", 0.12, {{"verify_credentials", 0.60}});
    addComp("user", 0.10, {{"load_profile", 0.30}, {"update_details", 0.35}});
    addComp("order", 0.08, {{"change_booking", 0.55}});
    addComp("persistence", 0.15, {{"store_record", 0.80}});
    addComp("travel", 0.02);
    addComp("station", 0.02);
    addComp("seat", 0.02);
    addComp("payment", 0.03);
    addComp("notify", 0.02);
    addComp("admin", 0.03);

    // central pivot topology plus the two direct service-to-service paths
    int linkNo = 0;
    auto addLink = [&m, &linkNo](const std::string& a, const std::string& b, double psi) {
        m.links.push_back({"link" + std::to_string(++linkNo), a, b, psi});
    };
    for (const char* peer : {"auth", "user", "order", "persistence", "travel", "station",
                             "seat", "payment", "notify", "admin"})
        addLink("node_gateway", std::string("node_") + peer, 0.01);
    addLink("node_auth", "node_user", 0.015);
    addLink("node_user", "node_persistence", 0.02);

    // two user classes (simple, admin) blended into the scenario mix
    m.scenarios.push_back(
        {"login", 0.5, OpenWorkload{1.2},
         {{"actor:user", "gateway", "route_login", 1.0, 1},
          {"gateway", "auth", "verify_credentials", 2.0, 1},
          {"auth", "user", "load_profile", 4.0, 1}}});
    m.scenarios.push_back(
        {"update_user_details", 0.25, OpenWorkload{0.4},
         {{"actor:admin", "gateway", "route_update", 1.0, 1},
          {"gateway", "user", "update_details", 6.0, 1},
          {"user", "persistence", "store_record", 8.0, 1}}});
    m.scenarios.push_back(
        {"rebook", 0.25, OpenWorkload{0.6},
         {{"actor:user", "gateway", "route_rebook", 1.0, 1},
          {"gateway", "order", "change_booking", 5.0, 1}}});

    validate(m);
    return m;
}

// Common Component Modeling Example trading system: 13 components on 8
// nodes, 3 scenarios (checkout sale, product registration, store report),
// 20 messages. Initial system reliability calibrated to ~0.75.
inline ArchModel cocomeFixture() {
    ArchModel m;

    const double theta = 0.018;
    auto addComp = [&m, theta](const std::string& id, std::vector<Operation> ops) {
        Component c;
        c.id = id;
        c.failureProb = theta;
        c.operations = std::move(ops);
        m.components.push_back(std::move(c));
    };

    addComp("cash_desk", {{"new_sale", 0.20}, {"pay_card", 0.15}});
    addComp("light_display", {{"show_total", 0.05}});
    addComp("bar_scanner", {{"scan_item", 0.18}});
    addComp("cash_box", {{"open_drawer", 0.20}});
    addComp("card_reader", {{"read_card", 0.25}});
    addComp("receipt_printer", {{"print_receipt", 0.50}});
    addComp("desk_line", {{"broadcast_update", 1.30}});
    addComp("coordinator", {{"log_delivery", 1.20}});
    addComp("store_app",
            {{"lookup_product", 0.22}, {"register_delivery", 0.30}, {"collect_stats", 0.25}});
    addComp("store_db", {{"query_product", 0.20}, {"update_stock", 0.15}, {"scan_sales", 0.30}});
    addComp("enterprise_app", {{"sync_inventory", 0.40}, {"aggregate_data", 0.60}});
    addComp("reporting", {{"request_report", 0.50}});
    addComp("dispatcher", {{"notify_arrival", 0.30}, {"archive_report", 0.35}});

    m.nodes = {{"n_desk", 1, 1.0},  {"n_scanner", 1, 1.0}, {"n_pay", 1, 1.0},
               {"n_printer", 1, 1.0}, {"n_line", 1, 1.0},  {"n_store", 1, 1.0},
               {"n_db", 1, 1.0},    {"n_enterprise", 1, 1.0}};

    m.deployment = {{"cash_desk", "n_desk"},        {"light_display", "n_desk"},
                    {"bar_scanner", "n_scanner"},   {"cash_box", "n_pay"},
                    {"card_reader", "n_pay"},       {"receipt_printer", "n_printer"},
                    {"desk_line", "n_line"},        {"coordinator", "n_line"},
                    {"store_app", "n_store"},       {"store_db", "n_db"},
                    {"enterprise_app", "n_enterprise"}, {"reporting", "n_enterprise"},
                    {"dispatcher", "n_enterprise"}};

    const double psi = 0.008;
    m.links = {{"lk_desk_scanner", "n_desk", "n_scanner", psi},
               {"lk_desk_pay", "n_desk", "n_pay", psi},
               {"lk_desk_printer", "n_desk", "n_printer", psi},
               {"lk_desk_line", "n_desk", "n_line", psi},
               {"lk_desk_store", "n_desk", "n_store", psi},
               {"lk_line_store", "n_line", "n_store", psi},
               {"lk_store_db", "n_store", "n_db", psi},
               {"lk_store_enterprise", "n_store", "n_enterprise", psi}};

    m.scenarios.push_back(
        {"checkout_sale", 0.5, OpenWorkload{0.8},
         {{"actor:customer", "cash_desk", "new_sale", 1.0, 1},
          {"cash_desk", "bar_scanner", "scan_item", 1.0, 3},
          {"cash_desk", "store_app", "lookup_product", 1.0, 3},
          {"store_app", "store_db", "query_product", 1.0, 3},
          {"cash_desk", "light_display", "show_total", 1.0, 1},
          {"actor:customer", "cash_desk", "pay_card", 1.0, 1},
          {"cash_desk", "card_reader", "read_card", 1.0, 1},
          {"cash_desk", "cash_box", "open_drawer", 1.0, 1},
          {"cash_desk", "receipt_printer", "print_receipt", 2.0, 1}}});
    m.scenarios.push_back(
        {"product_registration", 0.3, OpenWorkload{0.25},
         {{"actor:stock_manager", "store_app", "register_delivery", 1.0, 1},
          {"store_app", "store_db", "update_stock", 1.0, 5},
          {"store_app", "dispatcher", "notify_arrival", 1.0, 1},
          {"dispatcher", "enterprise_app", "sync_inventory", 1.0, 1},
          {"store_app", "coordinator", "log_delivery", 1.0, 1},
          {"coordinator", "desk_line", "broadcast_update", 1.0, 1}}});
    m.scenarios.push_back(
        {"store_report", 0.2, OpenWorkload{0.15},
         {{"actor:store_manager", "reporting", "request_report", 1.0, 1},
          {"reporting", "enterprise_app", "aggregate_data", 1.0, 1},
          {"enterprise_app", "store_app", "collect_stats", 1.0, 2},
          {"store_app", "store_db", "scan_sales", 1.0, 2},
          {"enterprise_app", "dispatcher", "archive_report", 1.0, 1}}});

    validate(m);
    return m;
}

}  // namespace refopt
