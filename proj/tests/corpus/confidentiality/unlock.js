const logger = require('./logger');

function unlock(device) {
  const passcode = device.passcode;
  logger.info(`unlocking with ${passcode}`);
}

module.exports = { unlock };

// expect: LoggedVar passcode 4 - Logging 5
// expect: LoggedVar passcode 5 - Logging 5
