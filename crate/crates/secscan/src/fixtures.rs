//! Curated snippet suite for evaluating the pattern detectors: positives
//! and negatives for RE, AC, AR, ULLC, DoS, BR and TM, hand-labeled with
//! the full set of expected classes. FR is heuristic-only and deliberately
//! absent from the expectations; evaluations ignore FR findings when
//! scoring against this suite.

use crate::VulnClass;

pub struct Fixture {
    pub name: &'static str,
    pub source: &'static str,
    /// Every hard class the detectors must (and may) report. Snippets can
    /// legitimately carry more than one class.
    pub expected: &'static [VulnClass],
}

/// The seven classes the suite scores (everything except FR and OTHER).
pub const HARD_CLASSES: &[VulnClass] = &[
    VulnClass::RE,
    VulnClass::AC,
    VulnClass::AR,
    VulnClass::ULLC,
    VulnClass::DoS,
    VulnClass::BR,
    VulnClass::TM,
];

pub const FIXTURES: &[Fixture] = &[
    // ---- reentrancy positives -------------------------------------------
    Fixture {
        name: "re_classic_withdraw",
        source: "pragma solidity ^0.8.0;\n\
contract Vault {\n\
    mapping(address => uint256) balances;\n\
    function withdraw() public {\n\
        require(balances[msg.sender] > 0);\n\
        (bool ok, ) = msg.sender.call{value: balances[msg.sender]}(\"\");\n\
        require(ok);\n\
        balances[msg.sender] = 0;\n\
    }\n\
}\n",
        expected: &[VulnClass::RE],
    },
    Fixture {
        name: "re_send_guarded",
        source: "pragma solidity ^0.8.0;\n\
contract Jar {\n\
    mapping(address => uint256) credit;\n\
    function take() public {\n\
        require(credit[msg.sender] > 0);\n\
        bool ok = msg.sender.send(credit[msg.sender]);\n\
        require(ok);\n\
        credit[msg.sender] = 0;\n\
    }\n\
}\n",
        expected: &[VulnClass::RE],
    },
    Fixture {
        name: "re_transfer_then_write",
        source: "pragma solidity ^0.8.0;\n\
contract Pool {\n\
    mapping(address => uint256) shares;\n\
    function exit() public {\n\
        if (shares[msg.sender] > 0) {\n\
            payable(msg.sender).transfer(shares[msg.sender]);\n\
            shares[msg.sender] = 0;\n\
        }\n\
    }\n\
}\n",
        expected: &[VulnClass::RE],
    },
    Fixture {
        name: "re_legacy_value_chain",
        source: "pragma solidity ^0.6.0;\n\
contract Old {\n\
    mapping(address => uint256) owed;\n\
    function claim() public {\n\
        require(owed[msg.sender] > 0);\n\
        msg.sender.call.value(owed[msg.sender])(\"\");\n\
        owed[msg.sender] = 0;\n\
    }\n\
}\n",
        expected: &[VulnClass::RE, VulnClass::ULLC],
    },
    // ---- reentrancy negatives -------------------------------------------
    Fixture {
        name: "re_neg_effects_first",
        source: "pragma solidity ^0.8.0;\n\
contract Safe {\n\
    mapping(address => uint256) balances;\n\
    function withdraw() public {\n\
        uint256 amount = balances[msg.sender];\n\
        require(amount > 0);\n\
        balances[msg.sender] = 0;\n\
        (bool ok, ) = msg.sender.call{value: amount}(\"\");\n\
        require(ok);\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "re_neg_no_later_write",
        source: "pragma solidity ^0.8.0;\n\
contract Pay {\n\
    function tip(address to) public {\n\
        require(to != address(0));\n\
        payable(to).transfer(1);\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "re_neg_unrelated_write",
        source: "pragma solidity ^0.8.0;\n\
contract Counter {\n\
    uint256 count;\n\
    mapping(address => uint256) balances;\n\
    function ping() public {\n\
        require(balances[msg.sender] > 0);\n\
        payable(msg.sender).transfer(1);\n\
        count = count + 1;\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "re_neg_guard_after_call",
        source: "pragma solidity ^0.8.0;\n\
contract Late {\n\
    mapping(address => uint256) balances;\n\
    function poke() public {\n\
        payable(msg.sender).transfer(1);\n\
        require(balances[msg.sender] > 0);\n\
        balances[msg.sender] = 0;\n\
    }\n\
}\n",
        expected: &[],
    },
    // ---- access control positives ---------------------------------------
    Fixture {
        name: "ac_tx_origin_require",
        source: "pragma solidity ^0.8.0;\n\
contract Owned {\n\
    address owner;\n\
    function touch() public {\n\
        require(tx.origin == owner);\n\
        owner = tx.origin;\n\
    }\n\
}\n",
        expected: &[VulnClass::AC],
    },
    Fixture {
        name: "ac_tx_origin_if",
        source: "pragma solidity ^0.8.0;\n\
contract Gate {\n\
    address admin;\n\
    uint256 flag;\n\
    function open() public {\n\
        if (tx.origin == admin) {\n\
            flag = 1;\n\
        }\n\
    }\n\
}\n",
        expected: &[VulnClass::AC],
    },
    Fixture {
        name: "ac_unguarded_selfdestruct",
        source: "pragma solidity ^0.8.0;\n\
contract Killable {\n\
    function kill() public {\n\
        selfdestruct(payable(msg.sender));\n\
    }\n\
}\n",
        expected: &[VulnClass::AC],
    },
    Fixture {
        name: "ac_unguarded_owner_set",
        source: "pragma solidity ^0.8.0;\n\
contract Own {\n\
    address owner;\n\
    function setOwner(address next) public {\n\
        owner = next;\n\
    }\n\
}\n",
        expected: &[VulnClass::AC],
    },
    // ---- access control negatives ---------------------------------------
    Fixture {
        name: "ac_neg_msg_sender_guard",
        source: "pragma solidity ^0.8.0;\n\
contract Guarded {\n\
    address owner;\n\
    function claim() public {\n\
        require(msg.sender == owner);\n\
        owner = msg.sender;\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "ac_neg_guarded_selfdestruct",
        source: "pragma solidity ^0.8.0;\n\
contract Exit {\n\
    address owner;\n\
    function kill() public {\n\
        require(msg.sender == owner);\n\
        selfdestruct(payable(owner));\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "ac_neg_constructor_owner",
        source: "pragma solidity ^0.8.0;\n\
contract Boot {\n\
    address owner;\n\
    constructor() {\n\
        owner = msg.sender;\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "ac_neg_modifier_guard",
        source: "pragma solidity ^0.8.0;\n\
contract Admin {\n\
    address owner;\n\
    modifier onlyOwner() { require(msg.sender == owner); _; }\n\
    function setOwner(address next) public onlyOwner {\n\
        owner = next;\n\
    }\n\
}\n",
        expected: &[],
    },
    // ---- arithmetic positives -------------------------------------------
    Fixture {
        name: "ar_add_overflow",
        source: "pragma solidity ^0.4.24;\n\
contract Token {\n\
    mapping(address => uint256) balances;\n\
    function mint(address to, uint256 amount) public {\n\
        balances[to] = balances[to] + amount;\n\
    }\n\
}\n",
        expected: &[VulnClass::AR],
    },
    Fixture {
        name: "ar_sub_underflow",
        source: "pragma solidity ^0.4.24;\n\
contract Bank {\n\
    mapping(address => uint256) balances;\n\
    function burn(uint256 amount) public {\n\
        require(amount > 0);\n\
        balances[msg.sender] = balances[msg.sender] - amount;\n\
    }\n\
}\n",
        expected: &[VulnClass::AR],
    },
    Fixture {
        name: "ar_mul_overflow",
        source: "pragma solidity ^0.4.24;\n\
contract Scale {\n\
    uint256 total;\n\
    function grow(uint256 factor) public {\n\
        require(factor > 1);\n\
        total = total * factor;\n\
    }\n\
}\n",
        expected: &[VulnClass::AR],
    },
    Fixture {
        name: "ar_accumulator",
        source: "pragma solidity ^0.4.24;\n\
contract Acc {\n\
    uint256 sum;\n\
    function add(uint256 x) public {\n\
        sum = sum + x;\n\
    }\n\
}\n",
        expected: &[VulnClass::AR],
    },
    // ---- arithmetic negatives -------------------------------------------
    Fixture {
        name: "ar_neg_checked_pragma",
        source: "pragma solidity ^0.8.0;\n\
contract Token8 {\n\
    mapping(address => uint256) balances;\n\
    function mint(address to, uint256 amount) public {\n\
        balances[to] = balances[to] + amount;\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "ar_neg_safemath",
        source: "pragma solidity ^0.4.24;\n\
contract SafeToken {\n\
    using SafeMath for uint256;\n\
    mapping(address => uint256) balances;\n\
    function mint(address to, uint256 amount) public {\n\
        balances[to] = balances[to].add(amount);\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "ar_neg_no_arithmetic",
        source: "pragma solidity ^0.4.24;\n\
contract Store {\n\
    uint256 value;\n\
    function set(uint256 v) public {\n\
        require(v > 0);\n\
        value = v;\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "ar_neg_literal_only",
        source: "pragma solidity ^0.4.24;\n\
contract Fixed {\n\
    uint256 value;\n\
    function bump() public {\n\
        require(true);\n\
        value = 1 + 2;\n\
    }\n\
}\n",
        expected: &[],
    },
    // ---- unchecked low-level call positives -----------------------------
    Fixture {
        name: "ullc_bare_call",
        source: "pragma solidity ^0.8.0;\n\
contract Caller {\n\
    function ping(address target) public {\n\
        target.call(\"\");\n\
    }\n\
}\n",
        expected: &[VulnClass::ULLC],
    },
    Fixture {
        name: "ullc_bare_delegatecall",
        source: "pragma solidity ^0.8.0;\n\
contract Proxy {\n\
    function run(address impl, bytes memory data) public {\n\
        impl.delegatecall(data);\n\
    }\n\
}\n",
        expected: &[VulnClass::ULLC],
    },
    Fixture {
        name: "ullc_bare_send",
        source: "pragma solidity ^0.8.0;\n\
contract Drip {\n\
    function drip(address payable to) public {\n\
        to.send(1);\n\
    }\n\
}\n",
        expected: &[VulnClass::ULLC],
    },
    Fixture {
        name: "ullc_bare_staticcall",
        source: "pragma solidity ^0.8.0;\n\
contract Reader {\n\
    function peek(address target, bytes memory q) public {\n\
        target.staticcall(q);\n\
    }\n\
}\n",
        expected: &[VulnClass::ULLC],
    },
    // ---- unchecked low-level call negatives -----------------------------
    Fixture {
        name: "ullc_neg_checked_tuple",
        source: "pragma solidity ^0.8.0;\n\
contract Checked {\n\
    function ping(address target) public {\n\
        (bool ok, ) = target.call(\"\");\n\
        require(ok);\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "ullc_neg_require_send",
        source: "pragma solidity ^0.8.0;\n\
contract Strict {\n\
    function pay(address payable to) public {\n\
        require(to.send(1));\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "ullc_neg_transfer",
        source: "pragma solidity ^0.8.0;\n\
contract Mover {\n\
    function pay(address payable to) public {\n\
        to.transfer(1);\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "ullc_neg_assigned_result",
        source: "pragma solidity ^0.8.0;\n\
contract Kept {\n\
    function run(address impl, bytes memory data) public returns (bool) {\n\
        bool ok = impl.delegatecall(data);\n\
        return ok;\n\
    }\n\
}\n",
        expected: &[],
    },
    // ---- denial of service positives ------------------------------------
    Fixture {
        name: "dos_loop_transfer",
        source: "pragma solidity ^0.8.0;\n\
contract Payout {\n\
    address[] recipients;\n\
    function payAll() public {\n\
        for (uint256 i = 0; i < recipients.length; i++) {\n\
            payable(recipients[i]).transfer(1);\n\
        }\n\
    }\n\
}\n",
        expected: &[VulnClass::DoS],
    },
    Fixture {
        name: "dos_loop_call",
        source: "pragma solidity ^0.8.0;\n\
contract Notify {\n\
    address[] subs;\n\
    function notifyAll(bytes memory data) public {\n\
        for (uint256 i = 0; i < subs.length; i++) {\n\
            (bool ok, ) = subs[i].call(data);\n\
            require(ok);\n\
        }\n\
    }\n\
}\n",
        expected: &[VulnClass::DoS],
    },
    Fixture {
        name: "dos_while_send",
        source: "pragma solidity ^0.8.0;\n\
contract Queue {\n\
    address[] line;\n\
    uint256 next;\n\
    function drain() public {\n\
        while (next < line.length) {\n\
            uint256 i = next;\n\
            next = next + 1;\n\
            require(payable(line[i]).send(1));\n\
        }\n\
    }\n\
}\n",
        expected: &[VulnClass::DoS],
    },
    Fixture {
        name: "dos_while_call",
        source: "pragma solidity ^0.8.0;\n\
contract Sweeper {\n\
    address[] targets;\n\
    function sweep(bytes memory data) public {\n\
        uint256 i = 0;\n\
        while (i < targets.length) {\n\
            (bool ok, ) = targets[i].call(data);\n\
            require(ok);\n\
            i = i + 1;\n\
        }\n\
    }\n\
}\n",
        expected: &[VulnClass::DoS],
    },
    // ---- denial of service negatives ------------------------------------
    Fixture {
        name: "dos_neg_bounded_loop",
        source: "pragma solidity ^0.8.0;\n\
contract Fan {\n\
    function spray(address payable a) public {\n\
        for (uint256 i = 0; i < 3; i++) {\n\
            a.transfer(1);\n\
        }\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "dos_neg_pure_loop",
        source: "pragma solidity ^0.8.0;\n\
contract Summer {\n\
    uint256[] xs;\n\
    function total() public returns (uint256) {\n\
        uint256 t = 0;\n\
        for (uint256 i = 0; i < xs.length; i++) {\n\
            t = t + xs[i];\n\
        }\n\
        return t;\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "dos_neg_no_loop",
        source: "pragma solidity ^0.8.0;\n\
contract Single {\n\
    function pay(address payable to) public {\n\
        to.transfer(2);\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "dos_neg_length_read_outside",
        source: "pragma solidity ^0.8.0;\n\
contract Meter {\n\
    uint256[] xs;\n\
    uint256 len;\n\
    function snap() public {\n\
        len = xs.length;\n\
    }\n\
}\n",
        expected: &[],
    },
    // ---- bad randomness positives ---------------------------------------
    Fixture {
        name: "br_blockhash_mod",
        source: "pragma solidity ^0.8.0;\n\
contract Lotto {\n\
    uint256 last;\n\
    function roll() public {\n\
        last = uint256(blockhash(block.number - 1)) % 10;\n\
    }\n\
}\n",
        expected: &[VulnClass::BR],
    },
    Fixture {
        name: "br_difficulty_seed",
        source: "pragma solidity ^0.8.0;\n\
contract Dice {\n\
    function spin(uint256 n) public returns (uint256) {\n\
        return block.difficulty % n;\n\
    }\n\
}\n",
        expected: &[VulnClass::BR],
    },
    Fixture {
        name: "br_prevrandao_index",
        source: "pragma solidity ^0.8.0;\n\
contract Pick {\n\
    address[] pool;\n\
    address winner;\n\
    function draw() public {\n\
        winner = pool[block.prevrandao % pool.length];\n\
    }\n\
}\n",
        expected: &[VulnClass::BR],
    },
    Fixture {
        name: "br_blockhash_branch",
        source: "pragma solidity ^0.8.0;\n\
contract Flip {\n\
    uint256 wins;\n\
    function flip() public {\n\
        if (uint256(blockhash(block.number - 1)) % 2 == 0) {\n\
            wins = wins + 1;\n\
        }\n\
    }\n\
}\n",
        expected: &[VulnClass::BR],
    },
    // ---- bad randomness negatives ---------------------------------------
    Fixture {
        name: "br_neg_keccak_sender",
        source: "pragma solidity ^0.8.0;\n\
contract Hashy {\n\
    bytes32 h;\n\
    function mix(uint256 nonce) public {\n\
        h = keccak256(abi.encodePacked(msg.sender, nonce));\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "br_neg_block_number",
        source: "pragma solidity ^0.8.0;\n\
contract Heights {\n\
    uint256 h;\n\
    function mark() public {\n\
        h = block.number;\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "br_neg_no_block",
        source: "pragma solidity ^0.8.0;\n\
contract Plain {\n\
    uint256 x;\n\
    function set(uint256 v) public {\n\
        require(v > 0);\n\
        x = v;\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "br_neg_supplied_randomness",
        source: "pragma solidity ^0.8.0;\n\
contract Seeded {\n\
    uint256 seed;\n\
    function reseed(uint256 s) public {\n\
        require(s != 0);\n\
        seed = s % 1000;\n\
    }\n\
}\n",
        expected: &[],
    },
    // ---- time manipulation positives ------------------------------------
    Fixture {
        name: "tm_require_deadline",
        source: "pragma solidity ^0.8.0;\n\
contract Sale {\n\
    uint256 deadline;\n\
    function buy() public {\n\
        require(block.timestamp > deadline);\n\
    }\n\
}\n",
        expected: &[VulnClass::TM],
    },
    Fixture {
        name: "tm_if_now",
        source: "pragma solidity ^0.4.24;\n\
contract OldSale {\n\
    uint256 end;\n\
    uint256 sold;\n\
    function buy() public {\n\
        if (now > end) {\n\
            revert();\n\
        }\n\
        sold = sold + 1;\n\
    }\n\
}\n",
        expected: &[VulnClass::AR, VulnClass::TM],
    },
    Fixture {
        name: "tm_assign_state",
        source: "pragma solidity ^0.8.0;\n\
contract Clock {\n\
    uint256 lastPing;\n\
    function ping() public {\n\
        lastPing = block.timestamp;\n\
    }\n\
}\n",
        expected: &[VulnClass::TM],
    },
    Fixture {
        name: "tm_while_window",
        source: "pragma solidity ^0.8.0;\n\
contract Wait {\n\
    uint256 until;\n\
    uint256 spins;\n\
    function spin() public {\n\
        while (block.timestamp < until) {\n\
            spins = spins + 1;\n\
        }\n\
    }\n\
}\n",
        expected: &[VulnClass::TM],
    },
    // ---- time manipulation negatives ------------------------------------
    Fixture {
        name: "tm_neg_emit_only",
        source: "pragma solidity ^0.8.0;\n\
contract Logger {\n\
    event Ping(uint256 at);\n\
    function ping() public {\n\
        emit Ping(block.timestamp);\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "tm_neg_no_time",
        source: "pragma solidity ^0.8.0;\n\
contract Quiet {\n\
    uint256 n;\n\
    function inc() public {\n\
        require(n < 100);\n\
        n = n + 1;\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "tm_neg_plain_identifier",
        source: "pragma solidity ^0.8.0;\n\
contract Stamp {\n\
    uint256 t;\n\
    function set(uint256 timestamp) public {\n\
        require(timestamp > 0);\n\
        t = timestamp;\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "tm_neg_event_args",
        source: "pragma solidity ^0.8.0;\n\
contract Echo {\n\
    event Beat(uint256 at, address from);\n\
    function beat() public {\n\
        emit Beat(block.timestamp, msg.sender);\n\
    }\n\
}\n",
        expected: &[],
    },
    // ---- generic negatives ----------------------------------------------
    Fixture {
        name: "neg_empty_contract",
        source: "pragma solidity ^0.8.0;\ncontract Empty {}\n",
        expected: &[],
    },
    Fixture {
        name: "neg_interface_only",
        source: "pragma solidity ^0.8.0;\n\
interface IThing {\n\
    function poke() external;\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "neg_internal_ledger",
        source: "pragma solidity ^0.8.0;\n\
contract Ledger {\n\
    mapping(address => uint256) balances;\n\
    function move(address to, uint256 amount) public {\n\
        require(balances[msg.sender] >= amount);\n\
        balances[msg.sender] = balances[msg.sender] - amount;\n\
        balances[to] = balances[to] + amount;\n\
    }\n\
}\n",
        expected: &[],
    },
    Fixture {
        name: "neg_event_counter",
        source: "pragma solidity ^0.8.0;\n\
contract Board {\n\
    uint256 total;\n\
    event Posted(address who);\n\
    function post() public {\n\
        total = total + 1;\n\
        emit Posted(msg.sender);\n\
    }\n\
}\n",
        expected: &[],
    },
];
