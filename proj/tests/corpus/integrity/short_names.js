const vm = require('vm');

function run(s, code) {
  return vm.runInNewContext(code + s);
}

module.exports = { run };

// expect: ApiParam code 3 run CodeInj 4
